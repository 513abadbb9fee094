#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "errors.hpp"
#include "feature_basis.hpp"
#include "point.hpp"

namespace bpielm {

/// Starting values and stopping rule of the evidence iteration.
struct EvidenceConfig {
  double eta0 = 0.2;       ///< initial prior precision
  double sigma2_0 = 1.0;   ///< initial noise variance
  int max_iterations = 200;
  double tolerance = 1e-6;  ///< on max |mu_k - mu_{k-1}|
  std::optional<double> fix_sigma2;  ///< hold the noise variance at this value

  void validate() const {
    if (!(eta0 > 0.0)) throw InvalidArgument("EvidenceConfig: eta0 must be positive");
    if (!(sigma2_0 > 0.0)) throw InvalidArgument("EvidenceConfig: sigma2_0 must be positive");
    if (!(tolerance > 0.0)) throw InvalidArgument("EvidenceConfig: tolerance must be positive");
    if (max_iterations < 1) throw InvalidArgument("EvidenceConfig: max_iterations must be >= 1");
    if (fix_sigma2 && !(*fix_sigma2 > 0.0))
      throw InvalidArgument("EvidenceConfig: fix_sigma2 must be positive");
  }
};

/// Gaussian posterior N(mu, sigma_mat) over the system's columns.
struct Posterior {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma_mat;
  double eta = 0.0;
  double sigma2 = 0.0;
  int iterations_used = 0;
  bool converged = false;

  Eigen::Index cols() const { return mu.size(); }
};

struct EvidenceUpdate {
  double eta = 0.0;
  double sigma2 = 0.0;
  double gamma = 0.0;  ///< effective number of well-determined parameters
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct ParameterEstimate {
  double mean = 0.0;
  double std = 0.0;
};

namespace detail {

/// SVD of H kept for repeated posterior evaluation at varying (eta, sigma2).
/// With H = U S V^T,
///   Sigma = V diag(sigma2 / (s^2 + eta sigma2)) V^T,
///   mu    = V diag(s / (s^2 + eta sigma2)) U^T Y,
/// which stays well defined when eta * sigma2 is far below eps * ||H||^2,
/// where a Cholesky factorization of H^T H + eta sigma2 I breaks down.
class SpectralSystem {
 public:
  explicit SpectralSystem(const CollocationSystem& sys) : rows_(sys.rows()), cols_(sys.cols()) {
    if (sys.rows() == 0 || sys.cols() == 0) throw EmptySystem("posterior: empty system");
    if (!sys.H.allFinite() || !sys.Y.allFinite())
      throw NumericalError("posterior: system contains non-finite entries");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.H, Eigen::ComputeThinU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw NumericalError("posterior: SVD of H failed");
    v_ = svd.matrixV();
    s_ = Eigen::VectorXd::Zero(cols_);
    proj_ = Eigen::VectorXd::Zero(cols_);
    const Eigen::Index k = svd.singularValues().size();
    s_.head(k) = svd.singularValues();
    proj_.head(k) = svd.matrixU().transpose() * sys.Y;
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  Eigen::VectorXd mean(double eta, double sigma2) const {
    const double ridge = eta * sigma2;
    Eigen::ArrayXd coef = s_.array() * proj_.array() / (s_.array().square() + ridge);
    return v_ * coef.matrix();
  }

  double covariance_trace(double eta, double sigma2) const {
    return (sigma2 / (s_.array().square() + eta * sigma2)).sum();
  }

  Eigen::MatrixXd covariance(double eta, double sigma2) const {
    const Eigen::VectorXd d = (sigma2 / (s_.array().square() + eta * sigma2)).matrix();
    Eigen::MatrixXd sigma = v_ * d.asDiagonal() * v_.transpose();
    return 0.5 * (sigma + sigma.transpose());
  }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::MatrixXd v_;
  Eigen::VectorXd s_;
  Eigen::VectorXd proj_;
};

inline void check_hyper(double eta, double sigma2) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw InvalidArgument("posterior: eta must be positive and finite");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw InvalidArgument("posterior: sigma2 must be positive and finite");
}

inline Posterior make_posterior(const SpectralSystem& spec, double eta, double sigma2) {
  check_hyper(eta, sigma2);
  Posterior post;
  post.mu = spec.mean(eta, sigma2);
  post.sigma_mat = spec.covariance(eta, sigma2);
  post.eta = eta;
  post.sigma2 = sigma2;
  if (!post.mu.allFinite() || !post.sigma_mat.allFinite())
    throw NumericalError("posterior: non-finite mean or covariance (eta=" + std::to_string(eta) +
                         ", sigma2=" + std::to_string(sigma2) + ")");
  return post;
}

/// MacKay update from the current statistics.
inline EvidenceUpdate evidence_update(Eigen::Index rows, Eigen::Index cols, double eta,
                                      double covariance_trace, double mu_sq, double rss) {
  const double gamma = static_cast<double>(cols) - eta * covariance_trace;
  if (!(mu_sq > 0.0)) throw DegenerateFit("evidence_step: posterior mean is identically zero");
  const double dof = static_cast<double>(rows) - gamma;
  if (!(dof > 0.0))
    throw IllPosedEvidence("evidence_step: effective parameters " + std::to_string(gamma) +
                           " >= rows " + std::to_string(rows));
  if (!(rss > 0.0))
    throw IllPosedEvidence("evidence_step: residual vanished, noise variance would be zero");
  EvidenceUpdate up;
  up.gamma = gamma;
  up.eta = gamma / mu_sq;
  up.sigma2 = rss / dof;
  if (!(up.eta > 0.0) || !std::isfinite(up.eta) || !std::isfinite(up.sigma2))
    throw NumericalError("evidence_step: non-finite or non-positive update (gamma=" +
                         std::to_string(gamma) + ")");
  return up;
}

}  // namespace detail

/// Posterior for fixed hyperparameters:
/// Sigma = (eta I + H^T H / sigma2)^-1, mu = Sigma H^T Y / sigma2.
inline Posterior posterior(const CollocationSystem& system, double eta, double sigma2) {
  detail::check_hyper(eta, sigma2);
  const detail::SpectralSystem spec(system);
  return detail::make_posterior(spec, eta, sigma2);
}

/// One evidence-procedure step: gamma = n - eta tr(Sigma), eta <- gamma / mu^T mu,
/// sigma2 <- ||Y - H mu||^2 / (N - gamma).
inline EvidenceUpdate evidence_step(const CollocationSystem& system, const Posterior& current) {
  if (current.cols() != system.cols())
    throw InvalidArgument("evidence_step: posterior and system column counts differ");
  const double rss = (system.Y - system.H * current.mu).squaredNorm();
  return detail::evidence_update(system.rows(), system.cols(), current.eta,
                                 current.sigma_mat.trace(), current.mu.squaredNorm(), rss);
}

/// Alternates posterior and evidence updates until the posterior mean moves by
/// less than config.tolerance (max norm) or max_iterations is reached.
inline Posterior fit_evidence(const CollocationSystem& system, const EvidenceConfig& config = {}) {
  config.validate();
  const detail::SpectralSystem spec(system);

  double eta = config.eta0;
  double sigma2 = config.fix_sigma2.value_or(config.sigma2_0);
  Eigen::VectorXd mu = spec.mean(eta, sigma2);
  int iterations = 0;
  bool converged = false;
  while (iterations < config.max_iterations) {
    ++iterations;
    const double rss = (system.Y - system.H * mu).squaredNorm();
    const auto up = detail::evidence_update(spec.rows(), spec.cols(), eta,
                                            spec.covariance_trace(eta, sigma2), mu.squaredNorm(),
                                            rss);
    eta = up.eta;
    sigma2 = config.fix_sigma2.value_or(up.sigma2);
    Eigen::VectorXd next = spec.mean(eta, sigma2);
    if (!next.allFinite()) throw NumericalError("fit_evidence: non-finite posterior mean");
    const double delta = (next - mu).lpNorm<Eigen::Infinity>();
    mu = std::move(next);
    if (delta < config.tolerance) {
      converged = true;
      break;
    }
  }
  Posterior post = detail::make_posterior(spec, eta, sigma2);
  post.iterations_used = iterations;
  post.converged = converged;
  return post;
}

/// Predictive mean h mu and variance sigma2 + h Sigma h^T at each point, where h
/// is the plain feature row zero-padded over the n_params trailing columns.
inline std::vector<Prediction> predict(const Posterior& post, const RandomBasis& basis,
                                       std::span<const Point> points, Eigen::Index n_params = 0) {
  const Eigen::Index n = basis.size();
  if (n_params < 0 || post.cols() != n + n_params)
    throw InvalidArgument("predict: posterior has " + std::to_string(post.cols()) +
                          " columns, expected " + std::to_string(n + n_params));
  const Eigen::MatrixXd F = feature_matrix(basis, points);
  const Eigen::VectorXd mean = F * post.mu.head(n);
  const Eigen::VectorXd quad =
      (F * post.sigma_mat.topLeftCorner(n, n)).cwiseProduct(F).rowwise().sum();
  std::vector<Prediction> out(points.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    // h Sigma h^T >= 0 in exact arithmetic; clamp rounding below zero.
    out[i] = {mean[r], post.sigma2 + std::max(0.0, quad[r])};
  }
  return out;
}

/// Trailing parameter entries of the posterior with their marginal standard deviations.
inline std::vector<ParameterEstimate> extract_parameters(const Posterior& post,
                                                         Eigen::Index n_basis) {
  const Eigen::Index m = post.cols() - n_basis;
  if (n_basis < 0 || m <= 0) throw NoParameters("extract_parameters: posterior has no parameter columns");
  std::vector<ParameterEstimate> out;
  out.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index j = n_basis; j < post.cols(); ++j)
    out.push_back({post.mu[j], std::sqrt(std::max(0.0, post.sigma_mat(j, j)))});
  return out;
}

}  // namespace bpielm
