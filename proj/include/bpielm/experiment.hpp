#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "assembly.hpp"
#include "bayes.hpp"
#include "errors.hpp"
#include "feature_basis.hpp"
#include "format.hpp"
#include "metrics.hpp"
#include "pielm.hpp"
#include "problems.hpp"
#include "random.hpp"

namespace bpielm {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Method { bpielm, pielm };
enum class SweepAxis { neurons, boundary, noise };

inline const char* to_string(Method m) { return m == Method::bpielm ? "bpielm" : "pielm"; }

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::neurons: return "neurons";
    case SweepAxis::boundary: return "boundary";
    case SweepAxis::noise: return "noise";
  }
  return "?";
}

inline const char* to_string(BiasMode b) { return b == BiasMode::uniform ? "uniform" : "centered"; }

struct SweepConfig {
  SweepAxis axis = SweepAxis::neurons;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string problem;
  std::vector<Method> methods{Method::bpielm, Method::pielm};
  std::size_t n_neurons = 100;
  std::size_t n_collocation = 400;
  std::size_t n_boundary = 19;
  std::size_t n_data = 0;
  double noise_sigma = 0.01;
  double weight_range = 1.0;
  BiasMode bias_mode = BiasMode::uniform;
  /// Relative SVD cutoff of the pseudoinverse; unset means eps * max(rows, cols).
  std::optional<double> pinv_cutoff;
  std::vector<std::uint64_t> seeds{0};
  EvidenceConfig evidence;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "results";
  bool write_grids = true;

  void validate() const {
    bool known = false;
    for (const auto& n : problem_names()) known = known || n == problem;
    if (!known) throw ConfigError("unknown problem '" + problem + "'");
    if (methods.empty()) throw ConfigError("no method selected");
    if (n_neurons == 0) throw ConfigError("n_neurons must be positive");
    if (n_collocation == 0) throw ConfigError("n_collocation must be positive");
    if (n_boundary == 0) throw ConfigError("n_boundary must be positive");
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
    if (!(weight_range > 0.0)) throw ConfigError("weight_range must be positive");
    if (pinv_cutoff && !(*pinv_cutoff > 0.0)) throw ConfigError("pinv_cutoff must be positive");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    try {
      evidence.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    const auto spec = make_problem(problem);
    if (spec.is_inverse() && n_data == 0) throw ConfigError(problem + " needs n_data > 0");
    if (!spec.is_inverse() && n_data > 0) throw ConfigError(problem + " takes no n_data");
    if (sweep) {
      if (sweep->values.empty()) throw ConfigError("sweep needs at least one value");
      for (double v : sweep->values) {
        const bool count_axis = sweep->axis != SweepAxis::noise;
        if (count_axis && !(v >= 1.0 && v == std::floor(v)))
          throw ConfigError(std::string("sweep over ") + to_string(sweep->axis) +
                            " needs positive integer values");
        if (!count_axis && !(v >= 0.0)) throw ConfigError("noise sweep values must be >= 0");
      }
    }
  }
};

namespace detail {

template <typename T>
T take(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError("unknown field '" + item.key() + "' in " + where);
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"problem", "method", "n_neurons", "n_collocation", "n_boundary",
                          "n_data", "noise_sigma", "weight_range", "bias_mode", "pinv_cutoff",
                          "seeds", "evidence", "sweep", "output_dir", "write_grids",
                          "description"},
                         "config");
  ExperimentConfig c;
  if (!j.contains("problem")) throw ConfigError("missing field 'problem'");
  c.problem = detail::take<std::string>(j, "problem", "");

  const auto method = detail::take<std::string>(j, "method", "both");
  if (method == "both")
    c.methods = {Method::bpielm, Method::pielm};
  else if (method == "bpielm")
    c.methods = {Method::bpielm};
  else if (method == "pielm")
    c.methods = {Method::pielm};
  else
    throw ConfigError("method must be bpielm, pielm or both");

  auto count = [&](const char* key, std::size_t fallback) {
    const auto v = detail::take<long long>(j, key, static_cast<long long>(fallback));
    if (v < 0) throw ConfigError(std::string("field '") + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
  };
  c.n_neurons = count("n_neurons", c.n_neurons);
  c.n_collocation = count("n_collocation", c.n_collocation);
  c.n_boundary = count("n_boundary", c.n_boundary);
  c.n_data = count("n_data", c.n_data);
  c.noise_sigma = detail::take<double>(j, "noise_sigma", c.noise_sigma);
  c.weight_range = detail::take<double>(j, "weight_range", c.weight_range);

  const auto bias = detail::take<std::string>(j, "bias_mode", "uniform");
  if (bias == "uniform")
    c.bias_mode = BiasMode::uniform;
  else if (bias == "centered")
    c.bias_mode = BiasMode::centered;
  else
    throw ConfigError("bias_mode must be uniform or centered");

  if (j.contains("pinv_cutoff") && !j.at("pinv_cutoff").is_null())
    c.pinv_cutoff = detail::take<double>(j, "pinv_cutoff", 0.0);
  if (j.contains("seeds")) {
    c.seeds.clear();
    for (const auto& s : j.at("seeds")) {
      if (!s.is_number_integer() || s.get<long long>() < 0)
        throw ConfigError("seeds must be non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("evidence")) {
    const auto& e = j.at("evidence");
    if (!e.is_object()) throw ConfigError("evidence must be an object");
    detail::reject_unknown(e, {"eta0", "sigma2_0", "max_iterations", "tolerance", "fix_sigma2"},
                           "evidence");
    c.evidence.eta0 = detail::take<double>(e, "eta0", c.evidence.eta0);
    c.evidence.sigma2_0 = detail::take<double>(e, "sigma2_0", c.evidence.sigma2_0);
    c.evidence.max_iterations = detail::take<int>(e, "max_iterations", c.evidence.max_iterations);
    c.evidence.tolerance = detail::take<double>(e, "tolerance", c.evidence.tolerance);
    if (e.contains("fix_sigma2") && !e.at("fix_sigma2").is_null())
      c.evidence.fix_sigma2 = detail::take<double>(e, "fix_sigma2", 0.0);
  }
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const auto& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("sweep must be an object");
    detail::reject_unknown(s, {"axis", "values"}, "sweep");
    SweepConfig sw;
    const auto axis = detail::take<std::string>(s, "axis", "");
    if (axis == "neurons")
      sw.axis = SweepAxis::neurons;
    else if (axis == "boundary")
      sw.axis = SweepAxis::boundary;
    else if (axis == "noise")
      sw.axis = SweepAxis::noise;
    else
      throw ConfigError("sweep.axis must be neurons, boundary or noise");
    sw.values = detail::take<std::vector<double>>(s, "values", {});
    c.sweep = std::move(sw);
  }
  c.output_dir = detail::take<std::string>(j, "output_dir", c.output_dir);
  c.write_grids = detail::take<bool>(j, "write_grids", c.write_grids);
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

/// Fully resolved parameters of one (seed, sweep value) case.
struct CaseSettings {
  std::string problem;
  std::size_t n_neurons = 0;
  std::size_t n_collocation = 0;
  std::size_t n_boundary = 0;
  std::size_t n_data = 0;
  double noise_sigma = 0.0;
  double weight_range = 1.0;
  BiasMode bias_mode = BiasMode::uniform;
  std::optional<double> pinv_cutoff;
  std::uint64_t seed = 0;
  EvidenceConfig evidence;
};

struct GridSample {
  Point point;
  double exact = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

/// Outcome of one method on one case.
struct RunRecord {
  CaseSettings settings;
  Method method = Method::bpielm;
  std::optional<SweepAxis> sweep_axis;
  double sweep_value = 0.0;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
  std::vector<ParameterEstimate> parameters;
  double eta = 0.0;
  double sigma2 = 0.0;
  int iterations = 0;
  bool converged = false;
  Eigen::Index rank = 0;
  std::vector<GridSample> grid;
};

/// Everything random in a case, drawn from independent streams of the seed.
struct CaseInputs {
  ProblemSpec spec;
  RandomBasis basis;
  PointList collocation;
  SensorPlacement sensors;
};

inline CaseInputs prepare_case(const CaseSettings& s) {
  ProblemSpec spec = make_problem(s.problem);
  const int dims = spec.domain.spatial_dims();
  const auto n = static_cast<Eigen::Index>(s.n_neurons);
  RandomBasis basis =
      s.bias_mode == BiasMode::uniform
          ? init_basis(n, s.weight_range, derive_seed(s.seed, 0), dims)
          : init_centered_basis(n, s.weight_range, derive_seed(s.seed, 0),
                                spec.domain.bounding_box(), dims);
  Rng colloc_rng(derive_seed(s.seed, 1));
  PointList collocation = spec.domain.sample_interior(colloc_rng, s.n_collocation);
  SensorPlacement sensors =
      place_sensors(spec, s.n_boundary, s.n_data, s.noise_sigma, derive_seed(s.seed, 2));
  return {std::move(spec), std::move(basis), std::move(collocation), std::move(sensors)};
}

inline CollocationSystem assemble_case(const CaseInputs& in) {
  if (const auto* src = std::get_if<SeparableSource>(&in.spec.source))
    return assemble_inverse(in.basis, in.spec.op, *src, in.collocation, in.sensors.boundary_rows,
                            in.sensors.data);
  return assemble_forward(in.basis, in.spec.op, std::get<PointFunction>(in.spec.source),
                          in.collocation, in.sensors.boundary_rows);
}

/// Assembles, solves and scores one method on one case. Numerical failures are
/// captured in the record rather than thrown.
inline RunRecord run_method(const CaseInputs& in, const CaseSettings& s, Method method,
                            bool keep_grid) {
  RunRecord rec;
  rec.settings = s;
  rec.method = method;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const CollocationSystem sys = assemble_case(in);
    Posterior post;
    Eigen::VectorXd weights;
    if (method == Method::bpielm) {
      post = fit_evidence(sys, s.evidence);
      weights = post.mu;
    } else {
      const auto sol = s.pinv_cutoff ? solve_pinv(sys, *s.pinv_cutoff) : solve_pinv(sys);
      weights = sol.omega;
      rec.rank = sol.rank;
    }
    const auto t1 = std::chrono::steady_clock::now();

    const PointList grid = in.spec.domain.evaluation_grid();
    std::vector<double> exact(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) exact[i] = in.spec.exact_solution(grid[i]);

    std::vector<Prediction> pred;
    if (method == Method::bpielm) {
      pred = predict(post, in.basis, grid, sys.n_params);
      rec.eta = post.eta;
      rec.sigma2 = post.sigma2;
      rec.iterations = post.iterations_used;
      rec.converged = post.converged;
      if (sys.n_params > 0) rec.parameters = extract_parameters(post, sys.n_basis);
    } else {
      const Eigen::VectorXd mean = feature_matrix(in.basis, grid) * weights.head(sys.n_basis);
      pred.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        pred[i] = {mean[static_cast<Eigen::Index>(i)], 0.0};
      for (Eigen::Index j = sys.n_basis; j < sys.cols(); ++j) rec.parameters.push_back({weights[j], 0.0});
    }
    rec.metrics = evaluate(pred, exact);
    rec.metrics.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
    for (std::size_t k = 0; k < rec.parameters.size() && k < in.spec.exact_parameters.size(); ++k)
      rec.metrics.parameter_errors.push_back(
          std::abs(rec.parameters[k].mean - in.spec.exact_parameters[k]));
    bool finite = std::isfinite(rec.metrics.mae) && std::isfinite(rec.metrics.max_ae);
    for (const auto& p : rec.parameters) finite = finite && std::isfinite(p.mean);
    if (!finite) throw NumericalError("non-finite metrics");
    if (keep_grid) {
      rec.grid.reserve(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        rec.grid.push_back({grid[i], exact[i], pred[i].mean, std::sqrt(pred[i].variance)});
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.metrics = {};
    rec.parameters.clear();
  }
  return rec;
}

/// Resolved settings for every (sweep value, seed) pair, sweep-major.
inline std::vector<std::pair<CaseSettings, std::optional<double>>> expand_cases(
    const ExperimentConfig& c) {
  std::vector<std::optional<double>> sweep_values{std::nullopt};
  if (c.sweep) sweep_values.assign(c.sweep->values.begin(), c.sweep->values.end());
  std::vector<std::pair<CaseSettings, std::optional<double>>> out;
  for (const auto& sv : sweep_values) {
    for (auto seed : c.seeds) {
      CaseSettings s{c.problem,      c.n_neurons,  c.n_collocation, c.n_boundary,
                     c.n_data,       c.noise_sigma, c.weight_range, c.bias_mode,
                     c.pinv_cutoff,  seed,          c.evidence};
      if (sv) {
        switch (c.sweep->axis) {
          case SweepAxis::neurons: s.n_neurons = static_cast<std::size_t>(*sv); break;
          case SweepAxis::boundary: s.n_boundary = static_cast<std::size_t>(*sv); break;
          case SweepAxis::noise: s.noise_sigma = *sv; break;
        }
      }
      out.emplace_back(std::move(s), sv);
    }
  }
  return out;
}

/// Runs every case and method of the configuration, in a fixed order.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& c, bool keep_grids = false) {
  c.validate();
  std::vector<RunRecord> records;
  for (const auto& [settings, sweep_value] : expand_cases(c)) {
    std::optional<CaseInputs> inputs;
    std::string setup_error;
    try {
      inputs.emplace(prepare_case(settings));
    } catch (const Error& e) {
      setup_error = e.what();
    }
    for (Method m : c.methods) {
      RunRecord rec;
      if (inputs) {
        rec = run_method(*inputs, settings, m, keep_grids);
      } else {
        rec.settings = settings;
        rec.method = m;
        rec.error = setup_error;
      }
      if (sweep_value) {
        rec.sweep_axis = c.sweep->axis;
        rec.sweep_value = *sweep_value;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ---------------------------------------------------------------------------
// Output files

inline const char* results_csv_header() {
  return "problem,method,seed,sweep_axis,sweep_value,n_neurons,n_collocation,n_boundary,"
         "n_data,noise_sigma,weight_range,bias_mode,status,mae,max_ae,coverage,n_eval_points,"
         "lambda_mean,lambda_std,lambda_abs_error,eta,sigma2,iterations,converged,rank,"
         "wall_time_s,error";
}

namespace detail {

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

inline std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace detail

/// One results.csv line. With include_time == false the wall-time field is left
/// empty, which makes rows of repeated runs byte-identical.
inline std::string results_csv_row(const RunRecord& r, bool include_time = true) {
  const auto& s = r.settings;
  std::ostringstream os;
  os << s.problem << ',' << to_string(r.method) << ',' << s.seed << ','
     << (r.sweep_axis ? to_string(*r.sweep_axis) : "") << ','
     << (r.sweep_axis ? format_double(r.sweep_value) : "") << ',' << s.n_neurons << ','
     << s.n_collocation << ',' << s.n_boundary << ',' << s.n_data << ','
     << format_double(s.noise_sigma) << ',' << format_double(s.weight_range) << ','
     << to_string(s.bias_mode) << ',' << (r.ok ? "ok" : "failed") << ',';
  if (r.ok) {
    std::vector<double> means, stds;
    for (const auto& p : r.parameters) {
      means.push_back(p.mean);
      stds.push_back(p.std);
    }
    os << format_double(r.metrics.mae) << ',' << format_double(r.metrics.max_ae) << ','
       << format_double(r.metrics.two_sigma_coverage) << ',' << r.metrics.n_eval_points << ','
       << detail::join(means) << ',' << detail::join(stds) << ','
       << detail::join(r.metrics.parameter_errors) << ',';
    if (r.method == Method::bpielm)
      os << format_double(r.eta) << ',' << format_double(r.sigma2) << ',' << r.iterations << ','
         << (r.converged ? "true" : "false") << ",,";
    else
      os << ",,,," << r.rank << ',';
    if (include_time) os << format_double(r.metrics.wall_time_seconds);
    os << ',';
  } else {
    os << ",,,,,,,,,,,,," << detail::csv_safe(r.error);
  }
  return os.str();
}

inline std::string grid_file_name(const RunRecord& r) {
  std::string name = std::string("grid_") + to_string(r.method) + "_seed" +
                     std::to_string(r.settings.seed);
  if (r.sweep_axis) name += std::string("_") + to_string(*r.sweep_axis) + format_double(r.sweep_value);
  return name + ".csv";
}

inline void write_grid_csv(std::ostream& os, const RunRecord& r) {
  os << "x,y,exact,mean,std,abs_error\n";
  for (const auto& g : r.grid)
    os << format_double(g.point.x) << ',' << format_double(g.point.y) << ','
       << format_double(g.exact) << ',' << format_double(g.mean) << ',' << format_double(g.std)
       << ',' << format_double(std::abs(g.mean - g.exact)) << '\n';
}

/// Per (method, sweep value) medians over successful runs.
inline nlohmann::json summarize(const ExperimentConfig& c, const std::vector<RunRecord>& records) {
  nlohmann::json groups = nlohmann::json::array();
  std::vector<std::optional<double>> sweep_values{std::nullopt};
  if (c.sweep) sweep_values.assign(c.sweep->values.begin(), c.sweep->values.end());
  for (const auto& sv : sweep_values) {
    for (Method m : c.methods) {
      std::vector<double> mae, max_ae, cov, time;
      std::vector<std::vector<double>> lambda;
      std::size_t runs = 0, failed = 0;
      for (const auto& r : records) {
        if (r.method != m) continue;
        if (sv && (!r.sweep_axis || r.sweep_value != *sv)) continue;
        ++runs;
        if (!r.ok) {
          ++failed;
          continue;
        }
        mae.push_back(r.metrics.mae);
        max_ae.push_back(r.metrics.max_ae);
        cov.push_back(r.metrics.two_sigma_coverage);
        time.push_back(r.metrics.wall_time_seconds);
        if (lambda.size() < r.parameters.size()) lambda.resize(r.parameters.size());
        for (std::size_t k = 0; k < r.parameters.size(); ++k) lambda[k].push_back(r.parameters[k].mean);
      }
      nlohmann::json g;
      g["method"] = to_string(m);
      if (sv) {
        g["sweep_axis"] = to_string(c.sweep->axis);
        g["sweep_value"] = *sv;
      }
      g["n_runs"] = runs;
      g["n_failed"] = failed;
      nlohmann::json med;
      if (!mae.empty()) {
        med["mae"] = median(mae);
        med["max_ae"] = median(max_ae);
        med["coverage"] = median(cov);
        med["wall_time_s"] = median(time);
        nlohmann::json lam = nlohmann::json::array();
        for (auto& l : lambda) lam.push_back(median(l));
        med["lambda"] = lam;
      }
      g["median"] = med;
      groups.push_back(g);
    }
  }
  nlohmann::json out;
  out["problem"] = c.problem;
  out["n_seeds"] = c.seeds.size();
  out["groups"] = groups;
  return out;
}

/// Writes results.csv, summary.json and (optionally) one grid_*.csv per run.
inline void write_outputs(const ExperimentConfig& c, const std::vector<RunRecord>& records) {
  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  auto open = [](const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(dir / "results.csv");
    f << results_csv_header() << '\n';
    for (const auto& r : records) f << results_csv_row(r) << '\n';
    if (!f) throw ConfigError("write failed for results.csv");
  }
  {
    auto f = open(dir / "summary.json");
    f << summarize(c, records).dump(2) << '\n';
  }
  if (c.write_grids) {
    for (const auto& r : records) {
      if (!r.ok || r.grid.empty()) continue;
      auto f = open(dir / grid_file_name(r));
      write_grid_csv(f, r);
    }
  }
}

}  // namespace bpielm
