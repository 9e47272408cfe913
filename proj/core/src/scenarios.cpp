#include <string>
#include <vector>

#include "gpb/experiments.hpp"

namespace gpb {

namespace {

// Shared chassis: squared-exponential kernel on a [0, 1] grid with moderate
// observation noise and a norm budget matching the synthesized objectives.
ExperimentConfig grid_base() {
  ExperimentConfig c;
  c.kernel_family = "squared_exponential";
  c.lengthscale = 0.2;
  c.domain.dimension = 1;
  c.domain.points_per_axis = 64;
  c.domain.lower = 0.0;
  c.domain.upper = 1.0;
  c.objective.num_centers = 12;
  c.objective.target_norm = 2.0;
  c.objective.offset = 0.0;
  c.noise_scale = 0.1;
  c.confidence.norm_bound = 2.0;
  c.confidence.lambda = 1.0;
  c.confidence.delta = 0.1;
  return c;
}

struct Scenario {
  const char* name;
  const char* blurb;
  ExperimentConfig (*build)();
};

ExperimentConfig make_realizable() {
  ExperimentConfig c = grid_base();
  c.name = "realizable";
  c.domain.points_per_axis = 30;
  c.objective.seed = 7;
  c.objective.num_centers = 10;
  c.horizon = 200;
  c.replications = 20;
  c.base_seed = 101;
  c.algorithm.name = "gp_ucb";
  return c;
}

ExperimentConfig make_misspec_sin() {
  ExperimentConfig c = grid_base();
  c.name = "misspec_sin";
  c.objective.seed = 11;
  c.misspec.kind = "sinusoid";
  c.misspec.amplitude = 0.2;
  c.misspec.frequency = {7.0};
  c.horizon = 4096;
  c.replications = 20;
  c.base_seed = 211;
  c.algorithm.name = "phased_us";
  c.algorithm.split_delta = true;
  return c;
}

ExperimentConfig make_misspec_sign() {
  ExperimentConfig c = grid_base();
  c.name = "misspec_sign";
  c.objective.seed = 11;
  c.misspec.kind = "sign_pattern";
  c.misspec.amplitude = 0.2;
  c.misspec.seed = 99;
  c.horizon = 1000;
  c.replications = 20;
  c.base_seed = 307;
  c.algorithm.name = "ec_gp_ucb";
  c.algorithm.eps_input = 0.2;
  return c;
}

ExperimentConfig make_spike() {
  ExperimentConfig c = grid_base();
  c.name = "spike";
  c.misspec.kind = "spike";
  c.misspec.height = 0.2;
  c.misspec.location_index = 27;
  c.noise_scale = 0.0;
  c.confidence.norm_bound = 1.0;
  c.horizon = 100;
  c.replications = 1;
  c.base_seed = 401;
  c.algorithm.name = "gp_ucb";
  return c;
}

ExperimentConfig make_contextual_master() {
  ExperimentConfig c = grid_base();
  c.name = "contextual_master";
  c.objective.seed = 13;
  c.misspec.kind = "sinusoid";
  c.misspec.amplitude = 0.1;
  c.misspec.frequency = {5.0};
  c.rescale.enabled = true;
  c.rescale.margin = 0.05;
  c.contexts.enabled = true;
  c.contexts.pool_size = 8;
  c.contexts.subset_size = 16;
  c.contexts.seed = 5;
  c.horizon = 4096;
  c.replications = 10;
  c.base_seed = 509;
  c.algorithm.name = "master";
  c.algorithm.consistency_c = 2.0;
  c.algorithm.gamma_rounds = 512;
  return c;
}

ExperimentConfig make_gpucb_failure() {
  ExperimentConfig c = grid_base();
  c.name = "gpucb_failure";
  c.objective.seed = 17;
  c.misspec.kind = "sinusoid_opposing";
  c.misspec.amplitude = 0.3;
  c.horizon = 1000;
  c.replications = 10;
  c.base_seed = 601;
  c.algorithm.name = "gp_ucb";
  return c;
}

constexpr Scenario kScenarios[] = {
    {"realizable", "well-specified objective, plain optimistic play", make_realizable},
    {"misspec_sin", "smooth sinusoid gap, phased elimination", make_misspec_sin},
    {"misspec_sign", "per-point sign-flip gap, enlarged-confidence play", make_misspec_sign},
    {"spike", "hidden off-grid spike, noiseless", make_spike},
    {"contextual_master", "context subsets, rescaled rewards, bound balancing",
     make_contextual_master},
    {"gpucb_failure", "gap opposing the benchmark argmax, plain optimistic play",
     make_gpucb_failure},
};

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const Scenario& s : kScenarios) names.emplace_back(s.name);
  return names;
}

ExperimentConfig scenario_config(const std::string& name) {
  for (const Scenario& s : kScenarios) {
    if (name == s.name) return s.build();
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string scenario_blurb(const std::string& name) {
  for (const Scenario& s : kScenarios) {
    if (name == s.name) return s.blurb;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace gpb
