#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "errors.hpp"
#include "operators.hpp"
#include "point.hpp"
#include "random.hpp"

namespace bpielm {

/// Geometry of a benchmark domain: membership, bounding box, boundary
/// parametrization, interior sampling and the metric evaluation grid.
class DomainDescriptor {
 public:
  enum class Kind { butterfly, rectangle, interval };

  /// Star-shaped region x = a rho(th) cos th, y = b rho(th) sin th with
  /// rho(th) = 1 + cos th sin 4th.
  static DomainDescriptor butterfly(double a = 0.55, double b = 0.75) {
    DomainDescriptor d(Kind::butterfly);
    d.a_ = a;
    d.b_ = b;
    d.box_ = {-1.1, 1.1, -1.5, 1.5};
    return d;
  }
  static DomainDescriptor rectangle(double x_min, double x_max, double t_min, double t_max) {
    DomainDescriptor d(Kind::rectangle);
    d.box_ = {x_min, x_max, t_min, t_max};
    return d;
  }
  static DomainDescriptor interval(double x_min, double x_max) {
    DomainDescriptor d(Kind::interval);
    d.box_ = {x_min, x_max, 0.0, 0.0};
    return d;
  }

  Kind kind() const { return kind_; }
  const Box& bounding_box() const { return box_; }
  int spatial_dims() const { return kind_ == Kind::interval ? 1 : 2; }

  static double butterfly_radius(double theta) {
    return 1.0 + std::cos(theta) * std::sin(4.0 * theta);
  }

  Point butterfly_boundary(double theta) const {
    const double r = butterfly_radius(theta);
    return {a_ * r * std::cos(theta), b_ * r * std::sin(theta)};
  }

  /// Closed-domain membership; boundary points are accepted up to rounding.
  bool contains(const Point& p) const {
    constexpr double tol = 1e-12;
    switch (kind_) {
      case Kind::butterfly: {
        const double u = p.x / a_;
        const double v = p.y / b_;
        return std::hypot(u, v) <= butterfly_radius(std::atan2(v, u)) * (1.0 + tol);
      }
      case Kind::rectangle:
        return p.x >= box_.x_min - tol && p.x <= box_.x_max + tol && p.y >= box_.y_min - tol &&
               p.y <= box_.y_max + tol;
      case Kind::interval:
        return p.x >= box_.x_min - tol && p.x <= box_.x_max + tol && p.y == 0.0;
    }
    return false;
  }

  /// Uniform interior samples (rejection from the bounding box for the butterfly).
  PointList sample_interior(Rng& rng, std::size_t count) const {
    PointList pts;
    pts.reserve(count);
    while (pts.size() < count) {
      Point p{rng.uniform(box_.x_min, box_.x_max),
              kind_ == Kind::interval ? 0.0 : rng.uniform(box_.y_min, box_.y_max)};
      if (kind_ != Kind::butterfly || contains(p)) pts.push_back(p);
    }
    return pts;
  }

  /// 101 x 101 tensor grid over the bounding box (filtered by membership), or 201
  /// equidistant points on an interval.
  PointList evaluation_grid() const {
    PointList pts;
    if (kind_ == Kind::interval) {
      constexpr int n = 201;
      for (int i = 0; i < n; ++i)
        pts.push_back({box_.x_min + (box_.x_max - box_.x_min) * i / (n - 1), 0.0});
      return pts;
    }
    constexpr int n = 101;
    for (int i = 0; i < n; ++i) {
      const double x = box_.x_min + (box_.x_max - box_.x_min) * i / (n - 1);
      for (int j = 0; j < n; ++j) {
        const Point p{x, box_.y_min + (box_.y_max - box_.y_min) * j / (n - 1)};
        if (kind_ != Kind::butterfly || contains(p)) pts.push_back(p);
      }
    }
    return pts;
  }

 private:
  explicit DomainDescriptor(Kind kind) : kind_(kind) {}

  Kind kind_;
  Box box_{};
  double a_ = 0.0;
  double b_ = 0.0;
};

/// Sensor positions on the boundary plus noise-free constraint rows (periodic
/// pairs) that come with the geometry.
struct BoundaryLayout {
  PointList points;
  std::vector<BoundaryCondition::Kind> kinds;
  std::vector<BoundaryCondition> constraints;
};

using Source = std::variant<PointFunction, SeparableSource>;

/// One benchmark problem.
struct ProblemSpec {
  std::string name;
  LinearOperator op;
  Source source;
  DomainDescriptor domain;
  PointFunction exact_solution;
  std::vector<double> exact_parameters;  ///< empty for forward problems
  std::function<BoundaryLayout(std::size_t)> boundary_layout;
  std::function<PointList(std::size_t)> data_layout;  ///< null for forward problems
  std::size_t min_boundary_sensors = 1;

  bool is_inverse() const { return std::holds_alternative<SeparableSource>(source); }
};

struct SensorPlacement {
  SensorSet boundary;
  SensorSet data;
  /// One row per boundary sensor (same order as `boundary`), followed by the
  /// layout's noise-free constraints with target 0.
  std::vector<BoundarySensor> boundary_rows;
};

namespace detail {

/// Edge counts {initial, left, right} proportional to edge length, rounded down,
/// remainder handed out initial edge first.
inline std::array<std::size_t, 3> split_rectangle_budget(std::size_t n, const Box& box) {
  const double lengths[3] = {box.x_max - box.x_min, box.y_max - box.y_min,
                             box.y_max - box.y_min};
  const double total = lengths[0] + lengths[1] + lengths[2];
  std::array<std::size_t, 3> counts{};
  std::size_t used = 0;
  for (int e = 0; e < 3; ++e) {
    counts[e] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * lengths[e] / total));
    used += counts[e];
  }
  for (int e = 0; used < n; e = (e + 1) % 3, ++used) ++counts[e];
  return counts;
}

/// Initial edge (t = t_min, corners included) then the two lateral edges at
/// t_k = t_min + k (t_max - t_min) / n_edge, k = 1..n_edge.
inline BoundaryLayout rectangle_layout(std::size_t n, const Box& box, bool periodic) {
  const auto counts = split_rectangle_budget(n, box);
  BoundaryLayout layout;
  const std::size_t n_init = counts[0];
  for (std::size_t k = 0; k < n_init; ++k) {
    const double s = n_init == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(n_init - 1);
    layout.points.push_back({box.x_min + s * (box.x_max - box.x_min), box.y_min});
    layout.kinds.push_back(BoundaryCondition::Kind::initial);
  }
  const double span = box.y_max - box.y_min;
  for (int side = 0; side < 2; ++side) {
    const std::size_t m = counts[1 + side];
    const double x = side == 0 ? box.x_min : box.x_max;
    for (std::size_t k = 1; k <= m; ++k) {
      layout.points.push_back({x, box.y_min + span * static_cast<double>(k) / static_cast<double>(m)});
      layout.kinds.push_back(BoundaryCondition::Kind::dirichlet);
    }
  }
  if (periodic) {
    const std::size_t m = counts[1];
    for (std::size_t k = 1; k <= m; ++k) {
      const double t = box.y_min + span * static_cast<double>(k) / static_cast<double>(m);
      layout.constraints.push_back(
          BoundaryCondition::periodic_pair({box.x_min, t}, {box.x_max, t}));
    }
  }
  return layout;
}

/// Interval endpoints, alternating when more than two sensors are requested.
inline BoundaryLayout interval_layout(std::size_t n, const Box& box) {
  BoundaryLayout layout;
  for (std::size_t k = 0; k < n; ++k) {
    layout.points.push_back({k % 2 == 0 ? box.x_min : box.x_max, 0.0});
    layout.kinds.push_back(BoundaryCondition::Kind::dirichlet);
  }
  return layout;
}

/// N_u points strictly inside the interval at equal spacing.
inline PointList interval_interior(std::size_t n, const Box& box) {
  PointList pts;
  for (std::size_t k = 1; k <= n; ++k)
    pts.push_back({box.x_min + (box.x_max - box.x_min) * static_cast<double>(k) /
                                   static_cast<double>(n + 1),
                   0.0});
  return pts;
}

inline double sech(double z) { return 1.0 / std::cosh(z); }

}  // namespace detail

/// u_xx + u_yy = (16x^2 + 64y^2 - 12) exp(-(2x^2 + 4y^2)) on the butterfly,
/// u = 1/2 + exp(-(2x^2 + 4y^2)).
inline ProblemSpec poisson2d_butterfly() {
  const auto domain = DomainDescriptor::butterfly();
  return ProblemSpec{
      .name = "poisson2d_butterfly",
      .op = LinearOperator({DifferentialTerm::constant(1.0, 2, 0),
                            DifferentialTerm::constant(1.0, 0, 2)}),
      .source = PointFunction([](const Point& p) {
        return (16.0 * p.x * p.x + 64.0 * p.y * p.y - 12.0) *
               std::exp(-(2.0 * p.x * p.x + 4.0 * p.y * p.y));
      }),
      .domain = domain,
      .exact_solution =
          [](const Point& p) { return 0.5 + std::exp(-(2.0 * p.x * p.x + 4.0 * p.y * p.y)); },
      .exact_parameters = {},
      .boundary_layout =
          [domain](std::size_t n) {
            BoundaryLayout layout;
            for (std::size_t k = 0; k < n; ++k) {
              const double theta =
                  2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
              layout.points.push_back(domain.butterfly_boundary(theta));
              layout.kinds.push_back(BoundaryCondition::Kind::dirichlet);
            }
            return layout;
          },
      .data_layout = nullptr,
      .min_boundary_sensors = 1,
  };
}

/// u_t - c u_x = 0 with c = -2 on [0,1] x [0,1], periodic in x; the exact
/// solution is a sech pulse advected with the flow.
inline ProblemSpec advection1d() {
  constexpr double c = -2.0;
  constexpr double x1 = 0.0;
  constexpr double x2 = 1.0;
  constexpr double x0 = 0.5;
  constexpr double len = x2 - x1;
  const auto domain = DomainDescriptor::rectangle(x1, x2, 0.0, 1.0);
  return ProblemSpec{
      .name = "advection1d",
      .op = LinearOperator({DifferentialTerm::constant(1.0, 0, 1),
                            DifferentialTerm::constant(-c, 1, 0)}),
      .source = PointFunction([](const Point&) { return 0.0; }),
      .domain = domain,
      .exact_solution =
          [](const Point& p) {
            const double a = p.x - x0 + c * p.y + len / 2.0;
            const double xi = a - len * std::floor(a / len);
            return 2.0 * detail::sech(3.0 * (-0.5 + xi));
          },
      .exact_parameters = {},
      .boundary_layout =
          [box = domain.bounding_box()](std::size_t n) {
            return detail::rectangle_layout(n, box, /*periodic=*/true);
          },
      .data_layout = nullptr,
      .min_boundary_sensors = 1,
  };
}

/// u_t - v u_xx = f on [0,1] x [0,2] with v = 0.01 and u = X(x) X(t),
/// X(s) = 2 cos(pi s + pi/5) + 1.5 cos(2 pi s - 3 pi/5).
inline ProblemSpec diffusion1d() {
  constexpr double v = 0.01;
  constexpr double pi = std::numbers::pi;
  struct Profile {
    static double f(double s) { return 2.0 * std::cos(pi * s + pi / 5) + 1.5 * std::cos(2 * pi * s - 3 * pi / 5); }
    static double df(double s) { return -2.0 * pi * std::sin(pi * s + pi / 5) - 3.0 * pi * std::sin(2 * pi * s - 3 * pi / 5); }
    static double d2f(double s) { return -2.0 * pi * pi * std::cos(pi * s + pi / 5) - 6.0 * pi * pi * std::cos(2 * pi * s - 3 * pi / 5); }
  };
  const auto domain = DomainDescriptor::rectangle(0.0, 1.0, 0.0, 2.0);
  return ProblemSpec{
      .name = "diffusion1d",
      .op = LinearOperator({DifferentialTerm::constant(1.0, 0, 1),
                            DifferentialTerm::constant(-v, 2, 0)}),
      .source = PointFunction([](const Point& p) {
        return Profile::f(p.x) * Profile::df(p.y) - v * Profile::d2f(p.x) * Profile::f(p.y);
      }),
      .domain = domain,
      .exact_solution = [](const Point& p) { return Profile::f(p.x) * Profile::f(p.y); },
      .exact_parameters = {},
      .boundary_layout =
          [box = domain.bounding_box()](std::size_t n) {
            return detail::rectangle_layout(n, box, /*periodic=*/false);
          },
      .data_layout = nullptr,
      .min_boundary_sensors = 1,
  };
}

/// u_xx + lambda_1 sin(0.7x) + lambda_2 cos(1.5x) = 0 on [-10, 10],
/// u = sin(0.7x) + cos(1.5x) - 0.1x, lambda = (0.49, 2.25).
inline ProblemSpec inverse_poisson1d() {
  const auto domain = DomainDescriptor::interval(-10.0, 10.0);
  const auto box = domain.bounding_box();
  return ProblemSpec{
      .name = "inverse_poisson1d",
      .op = LinearOperator({DifferentialTerm::constant(1.0, 2, 0)}),
      .source = SeparableSource({[](const Point& p) { return std::sin(0.7 * p.x); },
                                 [](const Point& p) { return std::cos(1.5 * p.x); }},
                                [](const Point&) { return 0.0; }),
      .domain = domain,
      .exact_solution =
          [](const Point& p) { return std::sin(0.7 * p.x) + std::cos(1.5 * p.x) - 0.1 * p.x; },
      .exact_parameters = {0.49, 2.25},
      .boundary_layout = [box](std::size_t n) { return detail::interval_layout(n, box); },
      .data_layout = [box](std::size_t n) { return detail::interval_interior(n, box); },
      .min_boundary_sensors = 2,
  };
}

/// u_xx + 10 u + lambda_1 f1 + lambda_2 f2 + lambda_3 = 0 on [-2 pi, 2 pi] with
/// f1 = sin2x cos4x, f2 = cos2x sin4x and u = sin2x cos4x + 1, so that
/// lambda = (10, 16, -10).
inline ProblemSpec inverse_helmholtz1d() {
  constexpr double k2 = 10.0;
  const auto domain = DomainDescriptor::interval(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  const auto box = domain.bounding_box();
  return ProblemSpec{
      .name = "inverse_helmholtz1d",
      .op = LinearOperator({DifferentialTerm::constant(1.0, 2, 0),
                            DifferentialTerm::constant(k2, 0, 0)}),
      .source = SeparableSource(
          {[](const Point& p) { return std::sin(2.0 * p.x) * std::cos(4.0 * p.x); },
           [](const Point& p) { return std::cos(2.0 * p.x) * std::sin(4.0 * p.x); },
           [](const Point&) { return 1.0; }},
          [](const Point&) { return 0.0; }),
      .domain = domain,
      .exact_solution =
          [](const Point& p) { return std::sin(2.0 * p.x) * std::cos(4.0 * p.x) + 1.0; },
      .exact_parameters = {10.0, 16.0, -10.0},
      .boundary_layout = [box](std::size_t n) { return detail::interval_layout(n, box); },
      .data_layout = [box](std::size_t n) { return detail::interval_interior(n, box); },
      .min_boundary_sensors = 2,
  };
}

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"poisson2d_butterfly", "advection1d",
                                                 "diffusion1d", "inverse_poisson1d",
                                                 "inverse_helmholtz1d"};
  return names;
}

inline ProblemSpec make_problem(std::string_view name) {
  if (name == "poisson2d_butterfly") return poisson2d_butterfly();
  if (name == "advection1d") return advection1d();
  if (name == "diffusion1d") return diffusion1d();
  if (name == "inverse_poisson1d") return inverse_poisson1d();
  if (name == "inverse_helmholtz1d") return inverse_helmholtz1d();
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

/// Boundary sensors along the layout and interior data sensors, with values
/// exact + N(0, noise_sigma^2). Boundary noise is drawn before data noise.
inline SensorPlacement place_sensors(const ProblemSpec& spec, std::size_t n_boundary,
                                     std::size_t n_data, double noise_sigma, std::uint64_t seed) {
  if (n_boundary < spec.min_boundary_sensors)
    throw InvalidArgument(spec.name + ": needs at least " +
                          std::to_string(spec.min_boundary_sensors) + " boundary sensors");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw InvalidArgument("place_sensors: noise sigma must be finite and non-negative");
  if (!spec.is_inverse() && n_data > 0)
    throw InvalidArgument(spec.name + ": forward problems take no interior data sensors");
  if (spec.is_inverse() && n_data == 0 && !spec.data_layout)
    throw InvalidArgument(spec.name + ": missing data layout");

  Rng rng(seed);
  auto measure = [&](const PointList& pts) {
    SensorSet set;
    set.points = pts;
    set.values.resize(static_cast<Eigen::Index>(pts.size()));
    set.noise_sigma.assign(pts.size(), noise_sigma);
    for (std::size_t i = 0; i < pts.size(); ++i)
      set.values[static_cast<Eigen::Index>(i)] =
          spec.exact_solution(pts[i]) + (noise_sigma > 0.0 ? noise_sigma * rng.normal() : 0.0);
    return set;
  };

  const BoundaryLayout layout = spec.boundary_layout(n_boundary);
  SensorPlacement out;
  out.boundary = measure(layout.points);
  if (spec.data_layout && n_data > 0) out.data = measure(spec.data_layout(n_data));

  for (std::size_t i = 0; i < layout.points.size(); ++i) {
    const Point& p = layout.points[i];
    auto bc = layout.kinds[i] == BoundaryCondition::Kind::initial ? BoundaryCondition::initial(p)
                                                                  : BoundaryCondition::dirichlet(p);
    out.boundary_rows.push_back({bc, out.boundary.values[static_cast<Eigen::Index>(i)]});
  }
  for (const auto& c : layout.constraints) out.boundary_rows.push_back({c, 0.0});
  return out;
}

}  // namespace bpielm
