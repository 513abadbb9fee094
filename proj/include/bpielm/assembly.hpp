#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "feature_basis.hpp"
#include "format.hpp"
#include "operators.hpp"
#include "point.hpp"

namespace bpielm {

/// Noisy point measurements of the solution.
struct SensorSet {
  PointList points;
  Eigen::VectorXd values;
  std::vector<double> noise_sigma;

  std::size_t size() const { return points.size(); }

  void validate() const {
    if (static_cast<Eigen::Index>(points.size()) != values.size())
      throw InvalidArgument("SensorSet: points and values differ in length");
    if (!noise_sigma.empty() && noise_sigma.size() != points.size())
      throw InvalidArgument("SensorSet: noise_sigma must be empty or one entry per sensor");
    for (double s : noise_sigma)
      if (!(s >= 0.0)) throw InvalidArgument("SensorSet: noise sigma must be non-negative");
  }
};

/// A boundary condition together with its measured right-hand side
/// (0 for periodic pairs).
struct BoundarySensor {
  BoundaryCondition condition;
  double value = 0.0;
};

enum class RowKind { pde, boundary, data };

inline const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::pde: return "pde";
    case RowKind::boundary: return "boundary";
    case RowKind::data: return "data";
  }
  return "?";
}

/// Optional per-kind row scaling. Every reproduction leaves all three at 1.
struct RowScale {
  double pde = 1.0;
  double boundary = 1.0;
  double data = 1.0;
};

/// Dense collocation system H w = Y. Columns are the n_basis output weights
/// followed by n_params unknown source coefficients.
struct CollocationSystem {
  Eigen::MatrixXd H;
  Eigen::VectorXd Y;
  Eigen::Index n_basis = 0;
  Eigen::Index n_params = 0;
  std::vector<RowKind> row_labels;

  Eigen::Index rows() const { return H.rows(); }
  Eigen::Index cols() const { return H.cols(); }

  Eigen::Index count(RowKind kind) const {
    Eigen::Index c = 0;
    for (auto k : row_labels) c += (k == kind);
    return c;
  }
};

namespace detail {

inline void append_boundary_rows(CollocationSystem& sys, Eigen::Index& row,
                                 const RandomBasis& basis,
                                 std::span<const BoundarySensor> sensors, double scale) {
  for (const auto& s : sensors) {
    sys.H.row(row).head(basis.size()) = scale * boundary_row(basis, s.condition).transpose();
    sys.Y[row] = scale * s.value;
    sys.row_labels[static_cast<std::size_t>(row)] = RowKind::boundary;
    ++row;
  }
}

}  // namespace detail

/// Forward system: N_f operator rows with the source on the right, then one row
/// per boundary sensor.
inline CollocationSystem assemble_forward(const RandomBasis& basis, const LinearOperator& op,
                                          const PointFunction& source,
                                          std::span<const Point> collocation,
                                          std::span<const BoundarySensor> boundary,
                                          const RowScale& scale = {}) {
  const auto n_f = static_cast<Eigen::Index>(collocation.size());
  const auto n_b = static_cast<Eigen::Index>(boundary.size());
  if (n_f + n_b == 0) throw EmptySystem("assemble_forward: no collocation points or sensors");
  if (n_f > 0 && !source) throw InvalidArgument("assemble_forward: missing source term");

  CollocationSystem sys;
  sys.n_basis = basis.size();
  sys.n_params = 0;
  sys.H.resize(n_f + n_b, basis.size());
  sys.Y.resize(n_f + n_b);
  sys.row_labels.assign(static_cast<std::size_t>(n_f + n_b), RowKind::pde);

  if (n_f > 0) {
    sys.H.topRows(n_f) = scale.pde * operator_matrix(basis, op, collocation);
    for (Eigen::Index i = 0; i < n_f; ++i)
      sys.Y[i] = scale.pde * source(collocation[static_cast<std::size_t>(i)]);
  }
  Eigen::Index row = n_f;
  detail::append_boundary_rows(sys, row, basis, boundary, scale.boundary);
  return sys;
}

/// Inverse system over [w, lambda]: operator rows carry +phi_j(p) in the m
/// parameter columns with the residual term on the right; boundary and data
/// rows are zero in the parameter columns.
inline CollocationSystem assemble_inverse(const RandomBasis& basis, const LinearOperator& op,
                                          const SeparableSource& source,
                                          std::span<const Point> collocation,
                                          std::span<const BoundarySensor> boundary,
                                          const SensorSet& data, const RowScale& scale = {}) {
  data.validate();
  const auto m = static_cast<Eigen::Index>(source.size());
  if (m == 0) throw InvalidArgument("assemble_inverse: no separable basis functions");
  const auto n_f = static_cast<Eigen::Index>(collocation.size());
  const auto n_b = static_cast<Eigen::Index>(boundary.size());
  const auto n_u = static_cast<Eigen::Index>(data.size());
  const Eigen::Index total = n_f + n_b + n_u;
  if (total == 0) throw EmptySystem("assemble_inverse: no rows");
  const Eigen::Index n = basis.size();

  CollocationSystem sys;
  sys.n_basis = n;
  sys.n_params = m;
  sys.H = Eigen::MatrixXd::Zero(total, n + m);
  sys.Y.resize(total);
  sys.row_labels.assign(static_cast<std::size_t>(total), RowKind::pde);

  if (n_f > 0) {
    sys.H.topLeftCorner(n_f, n) = scale.pde * operator_matrix(basis, op, collocation);
    for (Eigen::Index i = 0; i < n_f; ++i) {
      const Point& p = collocation[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < m; ++j)
        sys.H(i, n + j) = scale.pde * source.basis_functions()[static_cast<std::size_t>(j)](p);
      sys.Y[i] = scale.pde * source.residual_term()(p);
    }
  }
  Eigen::Index row = n_f;
  detail::append_boundary_rows(sys, row, basis, boundary, scale.boundary);
  if (n_u > 0) {
    sys.H.block(row, 0, n_u, n) = scale.data * feature_matrix(basis, data.points);
    sys.Y.segment(row, n_u) = scale.data * data.values;
    for (Eigen::Index i = 0; i < n_u; ++i)
      sys.row_labels[static_cast<std::size_t>(row + i)] = RowKind::data;
  }
  return sys;
}

/// Debug dump: one line per row, "label,Y,H_0,...,H_{n-1}".
inline void write_system_csv(std::ostream& os, const CollocationSystem& sys) {
  os << "label,y";
  for (Eigen::Index j = 0; j < sys.cols(); ++j) {
    if (j < sys.n_basis)
      os << ",w" << j;
    else
      os << ",lambda" << (j - sys.n_basis);
  }
  os << '\n';
  for (Eigen::Index i = 0; i < sys.rows(); ++i) {
    os << to_string(sys.row_labels[static_cast<std::size_t>(i)]) << ',' << format_double(sys.Y[i]);
    for (Eigen::Index j = 0; j < sys.cols(); ++j) os << ',' << format_double(sys.H(i, j));
    os << '\n';
  }
}

}  // namespace bpielm
