#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpb/algorithms.hpp"
#include "gpb/environments.hpp"

namespace gpb {

// ----- configuration ---------------------------------------------------

struct DomainConfig {
  int dimension = 1;
  int points_per_axis = 2;
  double lower = 0.0;
  double upper = 1.0;
  std::string csv_path;  // when set, points come from the file instead
};

struct ObjectiveConfig {
  std::uint64_t seed = 1;
  int num_centers = 1;
  double target_norm = 1.0;
  double offset = 0.0;
};

struct MisspecConfig {
  // none | sinusoid | sinusoid_opposing | sign_pattern | spike.
  // sinusoid_opposing picks the frequency at build time so the gap equals
  // -amplitude exactly at the benchmark's argmax.
  std::string kind = "none";
  double amplitude = 0.0;         // sinusoid, sinusoid_opposing, sign_pattern
  std::vector<double> frequency;  // sinusoid
  std::uint64_t seed = 0;         // sign_pattern
  double height = 0.0;            // spike
  int location_index = 0;         // spike: grid index of the hidden point
};

struct ConfidenceConfig {
  double norm_bound = 1.0;
  double lambda = 1.0;
  double delta = 0.1;
};

struct AlgorithmConfig {
  std::string name = "gp_ucb";  // gp_ucb | ec_gp_ucb | phased_us | master
  double eps_input = 0.0;       // ec_gp_ucb
  bool eps_oracle = false;      // ec_gp_ucb: use the objective's true gap
  bool split_delta = true;      // phased_us: divide delta across episodes
  double consistency_c = 2.0;   // master
  int gamma_rounds = 0;         // master; 0 means min(horizon, 512)
};

struct ContextConfig {
  bool enabled = false;
  int pool_size = 1;
  int subset_size = 1;
  std::uint64_t seed = 0;
};

struct RescaleConfig {
  bool enabled = false;  // affinely map the benchmark into [0, 1] with room
  double margin = 0.05;  // for the gap and this margin on both sides
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string kernel_family = "squared_exponential";  // linear | squared_exponential | matern
  double lengthscale = 1.0;
  double smoothness = 1.5;  // matern only: 0.5, 1.5 or 2.5
  DomainConfig domain;
  ObjectiveConfig objective;
  MisspecConfig misspec;
  double noise_scale = 0.1;  // 0 means noiseless observations
  ConfidenceConfig confidence;
  int horizon = 100;
  int replications = 1;
  std::uint64_t base_seed = 1;  // replication r uses stream seed base_seed + r
  AlgorithmConfig algorithm;
  ContextConfig contexts;
  RescaleConfig rescale;
};

// JSON round trip; malformed or inconsistent input throws ConfigError naming
// the offending field or key.
[[nodiscard]] ExperimentConfig config_from_json(const std::string& text);
[[nodiscard]] std::string config_to_json(const ExperimentConfig& config);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

// Kernel / raw point-set pieces of a config (the domain here is the
// configured grid or CSV, before any spike point is hidden).
[[nodiscard]] KernelSpec kernel_from_config(const ExperimentConfig& config);
[[nodiscard]] ActionDomain domain_from_config(const ExperimentConfig& config);

// ----- assembled experiment --------------------------------------------

// Everything run_experiment derives from a config before the first round.
struct ExperimentSetup {
  KernelSpec kernel;
  MisspecifiedObjective objective;
  ConfidenceParams confidence;  // noise_scale 0 is replaced by 1.0 here
  NoiseModel noise;
  std::optional<ContextDistribution> contexts;
  double rescale_scale;                    // a in  f~ -> a f~ + b  (1 if disabled)
  double rescale_offset;                   // b                     (0 if disabled)
  std::vector<double> resolved_frequency;  // sinusoid_opposing only
  std::optional<MasterConfig> master;      // master runs only
};

[[nodiscard]] ExperimentSetup build_setup(const ExperimentConfig& config);

// Fresh algorithm instance for one replication.
[[nodiscard]] std::unique_ptr<BanditAlgorithm> make_algorithm(const ExperimentConfig& config,
                                                              const ExperimentSetup& setup);

// ----- results -----------------------------------------------------------

struct ReplicationResult {
  int replication;     // 0-based
  std::uint64_t seed;  // base_seed + replication
  std::vector<TraceRow> rows;
  double final_regret_star;
  double final_regret_tilde;
  std::vector<EpisodeRecord> episodes;  // phased_us only
  std::vector<int> active_bases;        // master only
  std::vector<int> base_plays;          // master only
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string rng_stream;
  double eps_true;
  double rescale_scale;
  double rescale_offset;
  std::vector<double> resolved_frequency;
  std::optional<MasterConfig> master;
  std::vector<int> checkpoint_rounds;  // horizon/10, /4, /2 and horizon
  std::vector<double> mean_regret_star;   // per checkpoint, mean over replications
  std::vector<double> mean_regret_tilde;  // per checkpoint
  std::vector<ReplicationResult> replications;
};

// Runs the replications serially. Per round the stream is consumed in a
// fixed order: the context draw (contextual runs only), then the observation
// noise. Every replication's regret pair is checked against the 2 eps T gap
// bound before the function returns.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config);

// Trace CSV: header plus one row per (replication, round) with columns
// round,replication,algorithm,action_index,reward,inst_regret_star,
// cum_regret_star,cum_regret_tilde. Byte-identical across reruns.
void write_trace_csv(const ExperimentResult& result, std::ostream& out);

// Summary JSON: config echo, stream identifier, derived quantities,
// checkpoint means and per-replication totals.
void write_summary_json(const ExperimentResult& result, std::ostream& out);

// Shortest decimal string that strtod parses back to exactly v.
[[nodiscard]] std::string format_double(double v);

// ----- confidence coverage ------------------------------------------------

// Monte Carlo estimate of the confidence-interval failure rate in the
// well-specified setting: each run synthesizes a fresh objective (seed
// objective.seed + run), drives the plain optimistic algorithm for the
// configured horizon, and counts as violating if at any round some domain
// point's benchmark value falls outside mean +/- radius * sigma.
struct CoverageResult {
  int runs;
  int violating_runs;
  double fraction;
  double delta;  // configured failure probability, for comparison
};

[[nodiscard]] CoverageResult run_coverage(const ExperimentConfig& config, int runs);

// ----- scenario registry ----------------------------------------------------

[[nodiscard]] std::vector<std::string> scenario_names();
[[nodiscard]] ExperimentConfig scenario_config(const std::string& name);
[[nodiscard]] std::string scenario_blurb(const std::string& name);

}  // namespace gpb
