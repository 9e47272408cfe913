#include "gpb/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gpb/experiments.hpp"
#include "gpb/infogain.hpp"

namespace gpb {

namespace {

// Scenario names take precedence over files of the same name.
ExperimentConfig resolve_config(const std::string& target) {
  for (const std::string& name : scenario_names()) {
    if (name == target) return scenario_config(target);
  }
  if (!std::filesystem::exists(target)) {
    throw ConfigError("no scenario or config file named '" + target + "'");
  }
  return load_config(target);
}

int do_run(const std::string& target, const std::optional<std::uint64_t>& seed,
           const std::optional<int>& replications, const std::string& out_dir) {
  ExperimentConfig config = resolve_config(target);
  if (seed) config.base_seed = *seed;
  if (replications) config.replications = *replications;
  const ExperimentResult result = run_experiment(config);

  std::filesystem::create_directories(out_dir);
  const std::string trace_path = out_dir + "/" + config.name + "_trace.csv";
  const std::string summary_path = out_dir + "/" + config.name + "_summary.json";
  {
    std::ofstream trace(trace_path);
    if (!trace) throw std::runtime_error("cannot write " + trace_path);
    write_trace_csv(result, trace);
  }
  {
    std::ofstream summary(summary_path);
    if (!summary) throw std::runtime_error("cannot write " + summary_path);
    write_summary_json(result, summary);
  }

  char line[256];
  const std::size_t last = result.checkpoint_rounds.size() - 1;
  std::snprintf(line, sizeof(line),
                "%s: %d replications, horizon %d, mean final regret %.6f (true) / %.6f (benchmark)",
                config.name.c_str(), config.replications, config.horizon,
                result.mean_regret_star[last], result.mean_regret_tilde[last]);
  std::cout << line << "\n";
  std::cout << "wrote " << trace_path << "\n";
  std::cout << "wrote " << summary_path << "\n";
  return 0;
}

int do_gamma(const std::string& target) {
  const ExperimentConfig config = resolve_config(target);
  const KernelSpec kernel = kernel_from_config(config);
  const ActionDomain domain = domain_from_config(config);
  const double lambda = config.confidence.lambda;
  const int limit = std::min(config.horizon, 512);
  std::vector<int> ts;
  for (int t = 1; t <= limit; t *= 2) ts.push_back(t);
  if (ts.empty() || ts.back() != limit) ts.push_back(limit);

  std::cout << "method,t,lambda,value\n";
  char row[128];
  for (const int t : ts) {
    if (domain.size() <= 12 && t <= 8 && t <= domain.size()) {
      const GammaEstimate exact = gamma_exact(kernel, domain, t, lambda);
      std::snprintf(row, sizeof(row), "exact,%d,%.6f,%.6f\n", t, lambda, exact.value);
      std::cout << row;
    }
    const GammaEstimate greedy = gamma_greedy(kernel, domain, t, lambda);
    std::snprintf(row, sizeof(row), "greedy,%d,%.6f,%.6f\n", t, lambda, greedy.value);
    std::cout << row;
    const double upper = gamma_upper_estimate(kernel, domain, t, lambda);
    std::snprintf(row, sizeof(row), "upper,%d,%.6f,%.6f\n", t, lambda, upper);
    std::cout << row;
  }
  return 0;
}

int do_coverage(const std::string& target, int runs) {
  const ExperimentConfig config = resolve_config(target);
  const CoverageResult res = run_coverage(config, runs);
  char line[160];
  std::snprintf(line, sizeof(line), "runs=%d violating_runs=%d fraction=%.6f delta=%.6f",
                res.runs, res.violating_runs, res.fraction, res.delta);
  std::cout << line << "\n";
  return 0;
}

int do_scenarios() {
  for (const std::string& name : scenario_names()) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s %s", name.c_str(), scenario_blurb(name).c_str());
    std::cout << line << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"kernelized bandit experiments with misspecification-robust algorithms"};
  app.require_subcommand(1);

  std::string run_target;
  std::string out_dir = ".";
  std::uint64_t seed_value = 0;
  int reps_value = 0;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run a scenario or JSON config and write trace/summary files");
  run_cmd->add_option("config", run_target, "scenario name or config file path")->required();
  CLI::Option* seed_opt = run_cmd->add_option("--seed", seed_value, "override base_seed");
  CLI::Option* reps_opt = run_cmd->add_option("--replications", reps_value,
                                              "override the replication count")
                              ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_dir, "output directory (created if missing)");

  std::string gamma_target;
  CLI::App* gamma_cmd = app.add_subcommand(
      "gamma", "print information-gain estimates for a config's kernel and domain");
  gamma_cmd->add_option("config", gamma_target, "scenario name or config file path")->required();

  std::string cov_target;
  int cov_runs = 200;
  CLI::App* cov_cmd = app.add_subcommand(
      "coverage", "Monte Carlo confidence-interval failure rate, well-specified setting");
  cov_cmd->add_option("config", cov_target, "scenario name or config file path")->required();
  cov_cmd->add_option("--runs", cov_runs, "number of independent runs")
      ->check(CLI::PositiveNumber);

  CLI::App* sc_cmd = app.add_subcommand("scenarios", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      std::optional<int> reps;
      if (reps_opt->count() > 0) reps = reps_value;
      return do_run(run_target, seed, reps, out_dir);
    }
    if (gamma_cmd->parsed()) return do_gamma(gamma_target);
    if (cov_cmd->parsed()) return do_coverage(cov_target, cov_runs);
    if (sc_cmd->parsed()) return do_scenarios();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace gpb
