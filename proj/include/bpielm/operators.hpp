#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "feature_basis.hpp"
#include "point.hpp"

namespace bpielm {

using PointFunction = std::function<double(const Point&)>;

/// coeff(p) * d^(order_x + order_y) / dx^order_x dy^order_y.
struct DifferentialTerm {
  PointFunction coeff;
  int order_x = 0;
  int order_y = 0;

  static DifferentialTerm constant(double c, int order_x, int order_y) {
    return {[c](const Point&) { return c; }, order_x, order_y};
  }
};

/// Linear differential operator as a sum of terms. Terms are kept as data so
/// assembly can check their orders against the derivative cap.
class LinearOperator {
 public:
  explicit LinearOperator(std::vector<DifferentialTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("LinearOperator: needs at least one term");
    for (const auto& t : terms_) {
      if (!t.coeff) throw InvalidArgument("LinearOperator: term without coefficient");
      if (t.order_x < 0 || t.order_y < 0 || t.order_x + t.order_y > kMaxDerivativeOrder)
        throw UnsupportedOrder("LinearOperator: term order (" + std::to_string(t.order_x) + ", " +
                               std::to_string(t.order_y) + ") exceeds total order 3");
    }
  }

  const std::vector<DifferentialTerm>& terms() const { return terms_; }

  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    std::vector<DifferentialTerm> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return LinearOperator(std::move(terms));
  }

 private:
  std::vector<DifferentialTerm> terms_;
};

/// One boundary/initial constraint row. Dirichlet and initial rows equate the
/// network output at a point with a measured value; a periodic pair equates the
/// outputs at two points (target 0).
class BoundaryCondition {
 public:
  enum class Kind { dirichlet, periodic_pair, initial };

  static BoundaryCondition dirichlet(Point p) { return {Kind::dirichlet, p, p}; }
  static BoundaryCondition initial(Point p) { return {Kind::initial, p, p}; }
  static BoundaryCondition periodic_pair(Point a, Point b) {
    if (a == b) throw InvalidArgument("BoundaryCondition: periodic pair points must be distinct");
    return {Kind::periodic_pair, a, b};
  }

  Kind kind() const { return kind_; }
  const Point& point() const { return a_; }
  const Point& partner() const { return b_; }

 private:
  BoundaryCondition(Kind kind, Point a, Point b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  Point a_;
  Point b_;
};

/// Source written as sum_j phi_j(p) * lambda_j - residual(p) with unknown lambda.
/// The inverse assembly places +phi_j in the parameter columns and the residual
/// term on the right-hand side.
class SeparableSource {
 public:
  SeparableSource(std::vector<PointFunction> basis_functions, PointFunction residual_term)
      : basis_functions_(std::move(basis_functions)), residual_term_(std::move(residual_term)) {
    if (basis_functions_.empty())
      throw InvalidArgument("SeparableSource: needs at least one basis function");
    if (!residual_term_) throw InvalidArgument("SeparableSource: missing residual term");
  }

  std::size_t size() const { return basis_functions_.size(); }
  const std::vector<PointFunction>& basis_functions() const { return basis_functions_; }
  const PointFunction& residual_term() const { return residual_term_; }

 private:
  std::vector<PointFunction> basis_functions_;
  PointFunction residual_term_;
};

/// Rows of L applied to every feature, one row per point.
inline Eigen::MatrixXd operator_matrix(const RandomBasis& basis, const LinearOperator& op,
                                       std::span<const Point> points) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, basis.size());
  for (const auto& term : op.terms()) {
    const Eigen::MatrixXd block = feature_matrix(basis, points, term.order_x, term.order_y);
    for (Eigen::Index i = 0; i < rows; ++i)
      out.row(i) += term.coeff(points[static_cast<std::size_t>(i)]) * block.row(i);
  }
  return out;
}

/// L applied to every feature at a single point; dotted with the output weights
/// this is L u evaluated at the point.
inline Eigen::VectorXd operator_row(const RandomBasis& basis, const LinearOperator& op,
                                    const Point& point) {
  return operator_matrix(basis, op, std::span<const Point>(&point, 1)).row(0).transpose();
}

inline Eigen::VectorXd boundary_row(const RandomBasis& basis, const BoundaryCondition& bc) {
  const Point a = bc.point();
  Eigen::VectorXd row = feature_matrix(basis, std::span<const Point>(&a, 1)).row(0).transpose();
  if (bc.kind() == BoundaryCondition::Kind::periodic_pair) {
    const Point b = bc.partner();
    row -= feature_matrix(basis, std::span<const Point>(&b, 1)).row(0).transpose();
  }
  return row;
}

}  // namespace bpielm
