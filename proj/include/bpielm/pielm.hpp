#pragma once

#include <algorithm>
#include <limits>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "errors.hpp"

namespace bpielm {

/// Minimum-norm least-squares weights of the pseudoinverse baseline.
struct PointSolution {
  Eigen::VectorXd omega;
  Eigen::Index rank = 0;
  double svd_cutoff = 0.0;  ///< absolute threshold applied to the singular values
};

/// eps * max(rows, cols), the rank threshold used by LAPACK-style least-squares
/// drivers and by Eigen's own SVD solvers.
inline double default_pinv_cutoff(Eigen::Index rows, Eigen::Index cols) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(rows, cols));
}

/// omega = H^+ Y via SVD, zeroing singular values below relative_cutoff * s_max.
inline PointSolution solve_pinv(const CollocationSystem& system, double relative_cutoff) {
  if (system.rows() == 0 || system.cols() == 0) throw EmptySystem("solve_pinv: empty system");
  if (!(relative_cutoff > 0.0)) throw InvalidArgument("solve_pinv: cutoff must be positive");
  if (!system.H.allFinite() || !system.Y.allFinite())
    throw NumericalError("solve_pinv: system contains non-finite entries");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(system.H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("solve_pinv: SVD failed");
  const Eigen::VectorXd& s = svd.singularValues();

  PointSolution sol;
  sol.svd_cutoff = s.size() > 0 ? relative_cutoff * s[0] : 0.0;
  Eigen::VectorXd coef = svd.matrixU().transpose() * system.Y;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > sol.svd_cutoff) {
      coef[i] /= s[i];
      ++sol.rank;
    } else {
      coef[i] = 0.0;
    }
  }
  sol.omega = svd.matrixV() * coef;
  if (!sol.omega.allFinite()) throw NumericalError("solve_pinv: non-finite solution");
  return sol;
}

inline PointSolution solve_pinv(const CollocationSystem& system) {
  return solve_pinv(system, default_pinv_cutoff(system.rows(), system.cols()));
}

}  // namespace bpielm
