// Command-line runner for the benchmark experiments.
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpielm/bpielm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (item.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw bpielm::ConfigError("invalid seed '" + item + "'");
    }
    if (used != item.size()) throw bpielm::ConfigError("invalid seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw bpielm::ConfigError("--seeds needs at least one seed");
  return seeds;
}

int cmd_run(const std::string& config_path, const std::string& output_dir,
            const std::string& seeds_csv) {
  bpielm::ExperimentConfig config;
  try {
    config = bpielm::load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (!seeds_csv.empty()) config.seeds = parse_seed_list(seeds_csv);
    config.validate();
  } catch (const bpielm::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto records = bpielm::run_experiment(config, config.write_grids);
  try {
    bpielm::write_outputs(config, records);
  } catch (const bpielm::Error& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::size_t failed = 0;
  for (const auto& r : records) {
    if (r.ok) continue;
    ++failed;
    std::cerr << "run failed (" << bpielm::to_string(r.method) << ", seed " << r.settings.seed
              << "): " << r.error << '\n';
  }
  const auto summary = bpielm::summarize(config, records);
  for (const auto& g : summary["groups"]) {
    std::cout << g["method"].get<std::string>();
    if (g.contains("sweep_axis"))
      std::cout << " " << g["sweep_axis"].get<std::string>() << "="
                << bpielm::format_double(g["sweep_value"].get<double>());
    const auto& med = g["median"];
    if (med.contains("mae"))
      std::cout << "  median MAE " << med["mae"].get<double>() << "  Max-AE "
                << med["max_ae"].get<double>() << "  coverage " << med["coverage"].get<double>();
    if (med.contains("lambda") && !med["lambda"].empty()) std::cout << "  lambda " << med["lambda"].dump();
    std::cout << '\n';
  }
  std::cout << records.size() << " runs written to " << config.output_dir << '\n';
  return failed == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian physics-informed extreme learning machine experiments"};
  app.require_subcommand(1);

  std::string config_path, output_dir, seeds_csv;
  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  run->add_option("--config", config_path, "JSON experiment file")->required();
  run->add_option("--output-dir", output_dir, "Override the output directory");
  run->add_option("--seeds", seeds_csv, "Comma-separated seed list overriding the config");

  auto* list = app.add_subcommand("list-problems", "Print the available benchmark problems");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check an experiment configuration");
  validate->add_option("--config", validate_path, "JSON experiment file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*list) {
    for (const auto& name : bpielm::problem_names()) std::cout << name << '\n';
    return kExitOk;
  }
  if (*validate) {
    try {
      const auto config = bpielm::load_config(validate_path);
      std::cout << "ok: " << config.problem << ", " << bpielm::expand_cases(config).size()
                << " case(s) x " << config.methods.size() << " method(s)\n";
      return kExitOk;
    } catch (const bpielm::Error& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  return cmd_run(config_path, output_dir, seeds_csv);
}
