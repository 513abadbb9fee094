#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "errors.hpp"
#include "point.hpp"
#include "random.hpp"

namespace bpielm {

/// Highest total derivative order with a closed form in activation_derivative.
inline constexpr int kMaxDerivativeOrder = 3;

/// How the hidden-layer biases are drawn.
enum class BiasMode {
  /// gamma ~ U[-r, r], like alpha and beta.
  uniform,
  /// gamma = -(alpha * cx + beta * cy) with the center (cx, cy) uniform in a box,
  /// so every neuron's transition hyperplane passes through the region of interest.
  centered,
};

/// Frozen random input layer of a single-hidden-layer tanh network:
/// feature j at (x, y) is tanh(alpha_j * x + beta_j * y + gamma_j).
///
/// Immutable after construction and safe to share between threads.
class RandomBasis {
 public:
  RandomBasis(Eigen::VectorXd alpha, Eigen::VectorXd beta, Eigen::VectorXd gamma,
              double weight_range, std::uint64_t seed)
      : alpha_(std::move(alpha)),
        beta_(std::move(beta)),
        gamma_(std::move(gamma)),
        weight_range_(weight_range),
        seed_(seed) {
    if (alpha_.size() == 0) throw InvalidArgument("RandomBasis: neuron count must be positive");
    if (beta_.size() != alpha_.size() || gamma_.size() != alpha_.size())
      throw InvalidArgument("RandomBasis: alpha, beta and gamma must have equal length");
    if (!(weight_range_ > 0.0)) throw InvalidArgument("RandomBasis: weight range must be positive");
  }

  Eigen::Index size() const { return alpha_.size(); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& gamma() const { return gamma_; }
  double weight_range() const { return weight_range_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd gamma_;
  double weight_range_;
  std::uint64_t seed_;
};

namespace detail {

inline void check_basis_args(Eigen::Index n, double range, int spatial_dims) {
  if (n < 1) throw InvalidArgument("init_basis: neuron count must be >= 1");
  if (!(range > 0.0) || !std::isfinite(range))
    throw InvalidArgument("init_basis: weight range must be positive and finite");
  if (spatial_dims != 1 && spatial_dims != 2)
    throw InvalidArgument("init_basis: spatial_dims must be 1 or 2");
}

inline Eigen::VectorXd draw_uniform(Rng& rng, Eigen::Index n, double range) {
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = rng.uniform(-range, range);
  return v;
}

}  // namespace detail

/// Draws alpha, beta, gamma (in that order, n values each) uniformly from
/// [-range, range]. With spatial_dims == 1 beta is zeroed after drawing.
inline RandomBasis init_basis(Eigen::Index n, double range, std::uint64_t seed,
                              int spatial_dims = 2) {
  detail::check_basis_args(n, range, spatial_dims);
  Rng rng(seed);
  Eigen::VectorXd alpha = detail::draw_uniform(rng, n, range);
  Eigen::VectorXd beta = detail::draw_uniform(rng, n, range);
  Eigen::VectorXd gamma = detail::draw_uniform(rng, n, range);
  if (spatial_dims == 1) beta.setZero();
  return RandomBasis(std::move(alpha), std::move(beta), std::move(gamma), range, seed);
}

/// Like init_basis, but each bias is set so that neuron j is centred on a point
/// drawn uniformly from `centers`. |alpha|, |beta| <= range still holds; gamma is
/// bounded by range * (|cx| + |cy|) instead.
inline RandomBasis init_centered_basis(Eigen::Index n, double range, std::uint64_t seed,
                                       const Box& centers, int spatial_dims = 2) {
  detail::check_basis_args(n, range, spatial_dims);
  Rng rng(seed);
  Eigen::VectorXd alpha = detail::draw_uniform(rng, n, range);
  Eigen::VectorXd beta = detail::draw_uniform(rng, n, range);
  if (spatial_dims == 1) beta.setZero();
  Eigen::VectorXd gamma(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cx = rng.uniform(centers.x_min, centers.x_max);
    const double cy = rng.uniform(centers.y_min, centers.y_max);
    gamma[j] = -(alpha[j] * cx + beta[j] * cy);
  }
  return RandomBasis(std::move(alpha), std::move(beta), std::move(gamma), range, seed);
}

/// k-th derivative of tanh at z, k in 0..3.
inline double activation_derivative(double z, int order) {
  const double t = std::tanh(z);
  const double s = 1.0 - t * t;
  switch (order) {
    case 0: return t;
    case 1: return s;
    case 2: return -2.0 * t * s;
    case 3: return (6.0 * t * t - 2.0) * s;
    default:
      throw UnsupportedOrder("activation_derivative: order " + std::to_string(order) +
                             " outside 0..3");
  }
}

/// Matrix of d^(order_x + order_y) / dx^order_x dy^order_y of every feature at
/// every point: entry (i, j) = alpha_j^ox * beta_j^oy * tanh^(ox+oy)(z_ij).
inline Eigen::MatrixXd feature_matrix(const RandomBasis& basis, std::span<const Point> points,
                                      int order_x = 0, int order_y = 0) {
  if (order_x < 0 || order_y < 0 || order_x + order_y > kMaxDerivativeOrder)
    throw UnsupportedOrder("feature_matrix: orders (" + std::to_string(order_x) + ", " +
                           std::to_string(order_y) + ") exceed total order 3");
  const Eigen::Index n = basis.size();
  const auto rows = static_cast<Eigen::Index>(points.size());
  const int order = order_x + order_y;

  Eigen::ArrayXd scale = Eigen::ArrayXd::Ones(n);
  for (int k = 0; k < order_x; ++k) scale *= basis.alpha().array();
  for (int k = 0; k < order_y; ++k) scale *= basis.beta().array();

  Eigen::MatrixXd out(rows, n);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Point& p = points[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double z = basis.alpha()[j] * p.x + basis.beta()[j] * p.y + basis.gamma()[j];
      out(i, j) = scale[j] * activation_derivative(z, order);
    }
  }
  return out;
}

}  // namespace bpielm
