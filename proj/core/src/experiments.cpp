#include "gpb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "gpb/infogain.hpp"

namespace gpb {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail_field(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

std::string join_key(const std::string& parent, const char* key) {
  return parent.empty() ? std::string(key) : parent + "." + key;
}

void check_object(const Json& v, const std::string& path) {
  if (!v.is_object()) fail_field(path, "expected an object");
}

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("config: unknown key '" + item.key() + "' in '" +
                        (path.empty() ? std::string("top level") : path) + "'");
    }
  }
}

double get_double(const Json& obj, const std::string& parent, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) fail_field(join_key(parent, key), "expected a number");
  return v.get<double>();
}

int get_int(const Json& obj, const std::string& parent, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) fail_field(join_key(parent, key), "expected an integer");
  const auto wide = v.get<long long>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    fail_field(join_key(parent, key), "integer out of range");
  }
  return static_cast<int>(wide);
}

std::uint64_t get_u64(const Json& obj, const std::string& parent, const char* key,
                      std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  fail_field(join_key(parent, key), "expected a non-negative integer");
}

bool get_bool(const Json& obj, const std::string& parent, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_boolean()) fail_field(join_key(parent, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& obj, const std::string& parent, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_string()) fail_field(join_key(parent, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_double_array(const Json& obj, const std::string& parent, const char* key,
                                     const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_array()) fail_field(join_key(parent, key), "expected an array of numbers");
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number()) fail_field(join_key(parent, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_object(root, "config");
  check_keys(root, "",
             {"name", "kernel", "domain", "objective", "misspecification", "noise_scale",
              "confidence", "horizon", "replications", "base_seed", "algorithm", "contexts",
              "rescale"});

  ExperimentConfig c;
  c.name = get_string(root, "", "name", c.name);
  if (root.contains("kernel")) {
    const Json& k = root.at("kernel");
    check_object(k, "kernel");
    check_keys(k, "kernel", {"family", "lengthscale", "smoothness"});
    c.kernel_family = get_string(k, "kernel", "family", c.kernel_family);
    c.lengthscale = get_double(k, "kernel", "lengthscale", c.lengthscale);
    c.smoothness = get_double(k, "kernel", "smoothness", c.smoothness);
  }
  if (root.contains("domain")) {
    const Json& d = root.at("domain");
    check_object(d, "domain");
    check_keys(d, "domain", {"dimension", "points_per_axis", "lower", "upper", "csv_path"});
    c.domain.dimension = get_int(d, "domain", "dimension", c.domain.dimension);
    c.domain.points_per_axis = get_int(d, "domain", "points_per_axis", c.domain.points_per_axis);
    c.domain.lower = get_double(d, "domain", "lower", c.domain.lower);
    c.domain.upper = get_double(d, "domain", "upper", c.domain.upper);
    c.domain.csv_path = get_string(d, "domain", "csv_path", c.domain.csv_path);
  }
  if (root.contains("objective")) {
    const Json& o = root.at("objective");
    check_object(o, "objective");
    check_keys(o, "objective", {"seed", "num_centers", "target_norm", "offset"});
    c.objective.seed = get_u64(o, "objective", "seed", c.objective.seed);
    c.objective.num_centers = get_int(o, "objective", "num_centers", c.objective.num_centers);
    c.objective.target_norm = get_double(o, "objective", "target_norm", c.objective.target_norm);
    c.objective.offset = get_double(o, "objective", "offset", c.objective.offset);
  }
  if (root.contains("misspecification")) {
    const Json& m = root.at("misspecification");
    check_object(m, "misspecification");
    check_keys(m, "misspecification",
               {"kind", "amplitude", "frequency", "seed", "height", "location_index"});
    c.misspec.kind = get_string(m, "misspecification", "kind", c.misspec.kind);
    c.misspec.amplitude = get_double(m, "misspecification", "amplitude", c.misspec.amplitude);
    c.misspec.frequency = get_double_array(m, "misspecification", "frequency", c.misspec.frequency);
    c.misspec.seed = get_u64(m, "misspecification", "seed", c.misspec.seed);
    c.misspec.height = get_double(m, "misspecification", "height", c.misspec.height);
    c.misspec.location_index =
        get_int(m, "misspecification", "location_index", c.misspec.location_index);
  }
  c.noise_scale = get_double(root, "", "noise_scale", c.noise_scale);
  if (root.contains("confidence")) {
    const Json& f = root.at("confidence");
    check_object(f, "confidence");
    check_keys(f, "confidence", {"norm_bound", "lambda", "delta"});
    c.confidence.norm_bound = get_double(f, "confidence", "norm_bound", c.confidence.norm_bound);
    c.confidence.lambda = get_double(f, "confidence", "lambda", c.confidence.lambda);
    c.confidence.delta = get_double(f, "confidence", "delta", c.confidence.delta);
  }
  c.horizon = get_int(root, "", "horizon", c.horizon);
  c.replications = get_int(root, "", "replications", c.replications);
  c.base_seed = get_u64(root, "", "base_seed", c.base_seed);
  if (root.contains("algorithm")) {
    const Json& a = root.at("algorithm");
    check_object(a, "algorithm");
    check_keys(a, "algorithm",
               {"name", "eps_input", "eps_oracle", "split_delta", "consistency_c",
                "gamma_rounds"});
    c.algorithm.name = get_string(a, "algorithm", "name", c.algorithm.name);
    c.algorithm.eps_input = get_double(a, "algorithm", "eps_input", c.algorithm.eps_input);
    c.algorithm.eps_oracle = get_bool(a, "algorithm", "eps_oracle", c.algorithm.eps_oracle);
    c.algorithm.split_delta = get_bool(a, "algorithm", "split_delta", c.algorithm.split_delta);
    c.algorithm.consistency_c =
        get_double(a, "algorithm", "consistency_c", c.algorithm.consistency_c);
    c.algorithm.gamma_rounds = get_int(a, "algorithm", "gamma_rounds", c.algorithm.gamma_rounds);
  }
  if (root.contains("contexts")) {
    const Json& x = root.at("contexts");
    check_object(x, "contexts");
    check_keys(x, "contexts", {"enabled", "pool_size", "subset_size", "seed"});
    c.contexts.enabled = get_bool(x, "contexts", "enabled", c.contexts.enabled);
    c.contexts.pool_size = get_int(x, "contexts", "pool_size", c.contexts.pool_size);
    c.contexts.subset_size = get_int(x, "contexts", "subset_size", c.contexts.subset_size);
    c.contexts.seed = get_u64(x, "contexts", "seed", c.contexts.seed);
  }
  if (root.contains("rescale")) {
    const Json& s = root.at("rescale");
    check_object(s, "rescale");
    check_keys(s, "rescale", {"enabled", "margin"});
    c.rescale.enabled = get_bool(s, "rescale", "enabled", c.rescale.enabled);
    c.rescale.margin = get_double(s, "rescale", "margin", c.rescale.margin);
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  Json root;
  root["name"] = c.name;
  root["kernel"] = Json{{"family", c.kernel_family},
                        {"lengthscale", c.lengthscale},
                        {"smoothness", c.smoothness}};
  root["domain"] = Json{{"dimension", c.domain.dimension},
                        {"points_per_axis", c.domain.points_per_axis},
                        {"lower", c.domain.lower},
                        {"upper", c.domain.upper},
                        {"csv_path", c.domain.csv_path}};
  root["objective"] = Json{{"seed", c.objective.seed},
                           {"num_centers", c.objective.num_centers},
                           {"target_norm", c.objective.target_norm},
                           {"offset", c.objective.offset}};
  root["misspecification"] = Json{{"kind", c.misspec.kind},
                                  {"amplitude", c.misspec.amplitude},
                                  {"frequency", c.misspec.frequency},
                                  {"seed", c.misspec.seed},
                                  {"height", c.misspec.height},
                                  {"location_index", c.misspec.location_index}};
  root["noise_scale"] = c.noise_scale;
  root["confidence"] = Json{{"norm_bound", c.confidence.norm_bound},
                            {"lambda", c.confidence.lambda},
                            {"delta", c.confidence.delta}};
  root["horizon"] = c.horizon;
  root["replications"] = c.replications;
  root["base_seed"] = c.base_seed;
  root["algorithm"] = Json{{"name", c.algorithm.name},
                           {"eps_input", c.algorithm.eps_input},
                           {"eps_oracle", c.algorithm.eps_oracle},
                           {"split_delta", c.algorithm.split_delta},
                           {"consistency_c", c.algorithm.consistency_c},
                           {"gamma_rounds", c.algorithm.gamma_rounds}};
  root["contexts"] = Json{{"enabled", c.contexts.enabled},
                          {"pool_size", c.contexts.pool_size},
                          {"subset_size", c.contexts.subset_size},
                          {"seed", c.contexts.seed}};
  root["rescale"] = Json{{"enabled", c.rescale.enabled}, {"margin", c.rescale.margin}};
  return root.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

KernelSpec kernel_from_config(const ExperimentConfig& c) {
  if (c.kernel_family == "linear") return KernelSpec::linear();
  if (c.kernel_family == "squared_exponential") {
    if (!(c.lengthscale > 0.0) || !std::isfinite(c.lengthscale)) {
      fail_field("kernel.lengthscale", "must be finite and positive");
    }
    return KernelSpec::squared_exponential(c.lengthscale);
  }
  if (c.kernel_family == "matern") {
    if (!(c.lengthscale > 0.0) || !std::isfinite(c.lengthscale)) {
      fail_field("kernel.lengthscale", "must be finite and positive");
    }
    if (c.smoothness != 0.5 && c.smoothness != 1.5 && c.smoothness != 2.5) {
      fail_field("kernel.smoothness", "must be 0.5, 1.5 or 2.5");
    }
    return KernelSpec::matern(c.smoothness, c.lengthscale);
  }
  fail_field("kernel.family", "unknown family '" + c.kernel_family + "'");
}

ActionDomain domain_from_config(const ExperimentConfig& c) {
  try {
    if (!c.domain.csv_path.empty()) return ActionDomain::from_csv(c.domain.csv_path);
    return ActionDomain::grid(c.domain.dimension, c.domain.points_per_axis, c.domain.lower,
                              c.domain.upper);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field 'domain': ") + e.what());
  }
}

namespace {

void validate_config(const ExperimentConfig& c) {
  if (c.name.empty()) fail_field("name", "must not be empty");
  if (c.horizon < 1) fail_field("horizon", "must be >= 1");
  if (c.replications < 1) fail_field("replications", "must be >= 1");
  if (!(c.noise_scale >= 0.0) || !std::isfinite(c.noise_scale)) {
    fail_field("noise_scale", "must be finite and >= 0");
  }
  if (!(c.confidence.norm_bound > 0.0)) fail_field("confidence.norm_bound", "must be positive");
  if (!(c.confidence.lambda > 0.0)) fail_field("confidence.lambda", "must be positive");
  if (!(c.confidence.delta > 0.0 && c.confidence.delta < 1.0)) {
    fail_field("confidence.delta", "must lie in (0, 1)");
  }

  const std::string& mk = c.misspec.kind;
  if (mk != "none" && mk != "sinusoid" && mk != "sinusoid_opposing" && mk != "sign_pattern" &&
      mk != "spike") {
    fail_field("misspecification.kind", "unknown kind '" + mk + "'");
  }
  if (mk == "sinusoid" || mk == "sinusoid_opposing" || mk == "sign_pattern") {
    if (!(c.misspec.amplitude >= 0.0) || !std::isfinite(c.misspec.amplitude)) {
      fail_field("misspecification.amplitude", "must be finite and >= 0");
    }
  }
  if (mk == "sinusoid" && c.misspec.frequency.empty()) {
    fail_field("misspecification.frequency", "must have one entry per domain dimension");
  }
  if (mk == "spike") {
    if (!(c.misspec.height > 0.0) || !std::isfinite(c.misspec.height)) {
      fail_field("misspecification.height", "must be finite and positive");
    }
    if (c.misspec.location_index < 0) fail_field("misspecification.location_index", "must be >= 0");
  } else {
    if (c.objective.num_centers < 1) fail_field("objective.num_centers", "must be >= 1");
    if (!(c.objective.target_norm > 0.0) || !std::isfinite(c.objective.target_norm)) {
      fail_field("objective.target_norm", "must be finite and positive");
    }
    if (!std::isfinite(c.objective.offset)) fail_field("objective.offset", "must be finite");
  }

  const std::string& an = c.algorithm.name;
  if (an != "gp_ucb" && an != "ec_gp_ucb" && an != "phased_us" && an != "master") {
    fail_field("algorithm.name", "unknown algorithm '" + an + "'");
  }
  if (an == "ec_gp_ucb" && !c.algorithm.eps_oracle &&
      (!(c.algorithm.eps_input >= 0.0) || !std::isfinite(c.algorithm.eps_input))) {
    fail_field("algorithm.eps_input", "must be finite and >= 0");
  }
  if (an == "master") {
    if (!(c.algorithm.consistency_c > 0.0)) fail_field("algorithm.consistency_c", "must be positive");
    if (c.algorithm.gamma_rounds < 0) fail_field("algorithm.gamma_rounds", "must be >= 0");
  }

  if (c.contexts.enabled) {
    if (an == "phased_us") {
      throw ConfigError(
          "config: contexts cannot be combined with phased_us (it needs the full domain each "
          "round)");
    }
    if (c.contexts.pool_size < 1) fail_field("contexts.pool_size", "must be >= 1");
    if (c.contexts.subset_size < 1) fail_field("contexts.subset_size", "must be >= 1");
  }

  if (c.rescale.enabled) {
    if (mk == "spike") {
      throw ConfigError("config: rescale cannot be combined with the spike objective");
    }
    if (!(c.rescale.margin >= 0.0)) fail_field("rescale.margin", "must be >= 0");
    const double amp = (mk == "none") ? 0.0 : c.misspec.amplitude;
    if (!(c.rescale.margin + amp < 0.5)) {
      throw ConfigError(
          "config: rescale.margin + misspecification.amplitude must be below 0.5 so the target "
          "interval is non-empty");
    }
  }
}

// Frequency making the gap hit -amplitude exactly at the benchmark's argmax:
// along the argmax coordinate of largest magnitude, three quarters of a full
// period fit between the origin and the argmax.
std::vector<double> opposing_frequency(const RkhsFunction& benchmark, double offset,
                                       const ActionDomain& domain) {
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < domain.size(); ++i) {
    const double v = benchmark.value(domain.point(i)) + offset;
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const std::vector<double>& x = domain.point(best);
  int axis = -1;
  double best_abs = 1e-9;
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    if (std::abs(x[j]) > best_abs) {
      best_abs = std::abs(x[j]);
      axis = j;
    }
  }
  if (axis < 0) {
    throw ConfigError(
        "config: sinusoid_opposing is undefined when the benchmark argmax sits at the origin; "
        "change objective.seed");
  }
  std::vector<double> freq(x.size(), 0.0);
  freq[axis] = 0.75 / x[axis];
  return freq;
}

}  // namespace

ExperimentSetup build_setup(const ExperimentConfig& config) {
  validate_config(config);
  KernelSpec kernel = kernel_from_config(config);
  ActionDomain grid = domain_from_config(config);
  try {
    grid.validate_for(kernel);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field 'domain': ") + e.what());
  }

  double scale = 1.0;
  double shift = 0.0;
  std::vector<double> resolved_freq;

  std::optional<MisspecifiedObjective> objective;
  if (config.misspec.kind == "spike") {
    if (config.misspec.location_index >= grid.size()) {
      fail_field("misspecification.location_index",
                 "must be below the domain size " + std::to_string(grid.size()));
    }
    try {
      objective = MisspecifiedObjective::make_spike(kernel, grid, config.misspec.height,
                                                    config.misspec.location_index);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config field 'misspecification': ") + e.what());
    }
  } else {
    if (config.objective.num_centers > grid.size()) {
      fail_field("objective.num_centers",
                 "must not exceed the domain size " + std::to_string(grid.size()));
    }
    RkhsFunction raw = synthesize_rkhs(kernel, grid, config.objective.num_centers,
                                       config.objective.target_norm, config.objective.seed);
    double offset_total = config.objective.offset;
    RkhsFunction benchmark = raw;
    if (config.rescale.enabled) {
      double vmin = std::numeric_limits<double>::infinity();
      double vmax = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < grid.size(); ++i) {
        const double v = raw.value(grid.point(i)) + config.objective.offset;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      const double amp = (config.misspec.kind == "none") ? 0.0 : config.misspec.amplitude;
      const double lo = config.rescale.margin + amp;
      const double hi = 1.0 - config.rescale.margin - amp;
      if (vmax - vmin < 1e-12) {
        scale = 1.0;
        shift = 0.5 * (lo + hi) - vmin;
      } else {
        scale = (hi - lo) / (vmax - vmin);
        shift = lo - scale * vmin;
      }
      std::vector<double> coeffs = raw.coefficients();
      for (double& a : coeffs) a *= scale;
      benchmark = RkhsFunction(kernel, raw.centers(), std::move(coeffs));
      offset_total = scale * config.objective.offset + shift;
    }

    MisspecKind kind = MisspecNone{};
    if (config.misspec.kind == "sinusoid") {
      if (static_cast<int>(config.misspec.frequency.size()) != grid.dimension()) {
        fail_field("misspecification.frequency",
                   "needs " + std::to_string(grid.dimension()) + " entries");
      }
      kind = MisspecSinusoid{config.misspec.amplitude, config.misspec.frequency};
    } else if (config.misspec.kind == "sinusoid_opposing") {
      resolved_freq = opposing_frequency(benchmark, offset_total, grid);
      kind = MisspecSinusoid{config.misspec.amplitude, resolved_freq};
    } else if (config.misspec.kind == "sign_pattern") {
      kind = MisspecSignPattern{config.misspec.amplitude, config.misspec.seed};
    }
    objective = MisspecifiedObjective(std::move(benchmark), offset_total, std::move(kind),
                                      std::move(grid));
  }

  // A noiseless run still needs a positive scale inside the radius formula;
  // the objective's noise model stays at the configured value.
  const double conf_noise = config.noise_scale > 0.0 ? config.noise_scale : 1.0;
  ConfidenceParams confidence(config.confidence.norm_bound, conf_noise, config.confidence.lambda,
                              config.confidence.delta);
  NoiseModel noise(config.noise_scale);

  std::optional<ContextDistribution> contexts;
  if (config.contexts.enabled) {
    const int visible = objective->domain().size();
    if (config.contexts.subset_size > visible) {
      fail_field("contexts.subset_size",
                 "must not exceed the domain size " + std::to_string(visible));
    }
    contexts = ContextDistribution::uniform_random_pool(
        config.contexts.pool_size, config.contexts.subset_size, visible, config.contexts.seed);
  }

  std::optional<MasterConfig> master;
  if (config.algorithm.name == "master") {
    const int rounds = config.algorithm.gamma_rounds > 0 ? config.algorithm.gamma_rounds
                                                         : std::min(config.horizon, 512);
    const double gamma =
        gamma_upper_estimate(kernel, objective->domain(), rounds, config.confidence.lambda);
    master = make_master_config(config.horizon, gamma, confidence, config.algorithm.consistency_c);
  }

  return ExperimentSetup{kernel,
                         std::move(*objective),
                         confidence,
                         noise,
                         std::move(contexts),
                         scale,
                         shift,
                         std::move(resolved_freq),
                         std::move(master)};
}

std::unique_ptr<BanditAlgorithm> make_algorithm(const ExperimentConfig& config,
                                                const ExperimentSetup& setup) {
  const ActionDomain& domain = setup.objective.domain();
  const std::string& a = config.algorithm.name;
  if (a == "gp_ucb") {
    return std::make_unique<GpUcb>(setup.kernel, domain, setup.confidence);
  }
  if (a == "ec_gp_ucb") {
    const double eps =
        config.algorithm.eps_oracle ? setup.objective.eps_true() : config.algorithm.eps_input;
    return std::make_unique<EcGpUcb>(setup.kernel, domain, setup.confidence, eps);
  }
  if (a == "phased_us") {
    return std::make_unique<PhasedUncertaintySampling>(setup.kernel, domain, setup.confidence,
                                                       config.horizon,
                                                       config.algorithm.split_delta);
  }
  if (a == "master") {
    return std::make_unique<BalancingMaster>(setup.kernel, domain, setup.confidence,
                                             *setup.master);
  }
  fail_field("algorithm.name", "unknown algorithm '" + a + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentSetup setup = build_setup(config);
  const ActionDomain& domain = setup.objective.domain();
  std::vector<int> full(domain.size());
  std::iota(full.begin(), full.end(), 0);

  ExperimentResult result;
  result.config = config;
  result.rng_stream = SplitMix64::kStreamName;
  result.eps_true = setup.objective.eps_true();
  result.rescale_scale = setup.rescale_scale;
  result.rescale_offset = setup.rescale_offset;
  result.resolved_frequency = setup.resolved_frequency;
  result.master = setup.master;

  std::vector<int> cps{std::max(1, config.horizon / 10), std::max(1, config.horizon / 4),
                       std::max(1, config.horizon / 2), config.horizon};
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  result.checkpoint_rounds = cps;

  for (int r = 0; r < config.replications; ++r) {
    SplitMix64 rng(config.base_seed + static_cast<std::uint64_t>(r));
    std::unique_ptr<BanditAlgorithm> algo = make_algorithm(config, setup);
    RegretTrace trace;
    for (int t = 1; t <= config.horizon; ++t) {
      const std::span<const int> action_set =
          setup.contexts ? std::span<const int>(setup.contexts->sample(rng))
                         : std::span<const int>(full);
      const int a = algo->select(action_set);
      const double reward = observe(setup.objective, setup.noise, a, rng);
      trace.record_round(setup.objective, action_set, a, reward);
      algo->update(a, reward);
    }
    trace.validate_misspec_gap(setup.objective.eps_true());

    ReplicationResult rep;
    rep.replication = r;
    rep.seed = config.base_seed + static_cast<std::uint64_t>(r);
    rep.rows = trace.rows();
    rep.final_regret_star = trace.cum_regret_star();
    rep.final_regret_tilde = trace.cum_regret_tilde();
    if (const auto* phased = dynamic_cast<const PhasedUncertaintySampling*>(algo.get())) {
      rep.episodes = phased->episode_log();
    }
    if (const auto* master = dynamic_cast<const BalancingMaster*>(algo.get())) {
      rep.active_bases = master->active_bases();
      for (int i = 0; i < master->num_bases(); ++i) rep.base_plays.push_back(master->plays(i));
    }
    result.replications.push_back(std::move(rep));
  }

  for (const int cp : result.checkpoint_rounds) {
    double star = 0.0;
    double tilde = 0.0;
    for (const ReplicationResult& rep : result.replications) {
      star += rep.rows[cp - 1].cum_regret_star;
      tilde += rep.rows[cp - 1].cum_regret_tilde;
    }
    result.mean_regret_star.push_back(star / config.replications);
    result.mean_regret_tilde.push_back(tilde / config.replications);
  }
  return result;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void write_trace_csv(const ExperimentResult& result, std::ostream& out) {
  out << "round,replication,algorithm,action_index,reward,inst_regret_star,cum_regret_star,"
         "cum_regret_tilde\n";
  const std::string& algo = result.config.algorithm.name;
  for (const ReplicationResult& rep : result.replications) {
    for (const TraceRow& row : rep.rows) {
      out << row.round << ',' << rep.replication << ',' << algo << ',' << row.action_index << ','
          << format_double(row.reward) << ',' << format_double(row.inst_regret_star) << ','
          << format_double(row.cum_regret_star) << ',' << format_double(row.cum_regret_tilde)
          << '\n';
    }
  }
}

void write_summary_json(const ExperimentResult& result, std::ostream& out) {
  Json j;
  j["name"] = result.config.name;
  j["algorithm"] = result.config.algorithm.name;
  j["horizon"] = result.config.horizon;
  j["replications"] = result.config.replications;
  j["rng_stream"] = result.rng_stream;
  j["eps_true"] = result.eps_true;
  j["rescale"] = Json{{"enabled", result.config.rescale.enabled},
                      {"scale", result.rescale_scale},
                      {"offset", result.rescale_offset}};
  if (!result.resolved_frequency.empty()) {
    j["resolved_frequency"] = result.resolved_frequency;
  }
  if (result.master) {
    const MasterConfig& m = *result.master;
    j["master"] = Json{{"num_bases", m.num_bases},       {"eps_grid", m.eps_grid},
                       {"gamma_horizon", m.gamma_horizon}, {"beta_bar", m.beta_bar},
                       {"consistency_c", m.consistency_c}, {"clamped", m.clamped}};
  }
  Json cps = Json::array();
  for (std::size_t i = 0; i < result.checkpoint_rounds.size(); ++i) {
    cps.push_back(Json{{"round", result.checkpoint_rounds[i]},
                       {"mean_cum_regret_star", result.mean_regret_star[i]},
                       {"mean_cum_regret_tilde", result.mean_regret_tilde[i]}});
  }
  j["checkpoints"] = cps;
  Json reps = Json::array();
  for (const ReplicationResult& rep : result.replications) {
    Json rj{{"replication", rep.replication},
            {"seed", rep.seed},
            {"cum_regret_star", rep.final_regret_star},
            {"cum_regret_tilde", rep.final_regret_tilde}};
    if (!rep.episodes.empty()) {
      rj["episodes"] = static_cast<int>(rep.episodes.size());
      rj["final_active_count"] = static_cast<int>(rep.episodes.back().survivors.size());
    }
    if (!rep.base_plays.empty()) {
      rj["active_bases"] = rep.active_bases;
      rj["base_plays"] = rep.base_plays;
    }
    reps.push_back(std::move(rj));
  }
  j["replication_details"] = reps;
  j["config"] = Json::parse(config_to_json(result.config));
  out << j.dump(2) << '\n';
}

CoverageResult run_coverage(const ExperimentConfig& config, int runs) {
  if (runs < 1) throw InvalidParameter("run_coverage: runs must be >= 1");
  if (config.misspec.kind != "none") {
    throw ConfigError("coverage requires misspecification.kind == \"none\"");
  }
  if (config.contexts.enabled) {
    throw ConfigError("coverage does not support contexts");
  }
  int violating = 0;
  for (int r = 0; r < runs; ++r) {
    ExperimentConfig c = config;
    c.objective.seed = config.objective.seed + static_cast<std::uint64_t>(r);
    const ExperimentSetup setup = build_setup(c);
    const ActionDomain& domain = setup.objective.domain();
    SplitMix64 rng(config.base_seed + static_cast<std::uint64_t>(r));
    GpUcb algo(setup.kernel, domain, setup.confidence);
    std::vector<int> full(domain.size());
    std::iota(full.begin(), full.end(), 0);
    bool violated = false;
    for (int t = 1; t <= config.horizon && !violated; ++t) {
      const double rad = algo.radius();
      for (int i = 0; i < domain.size(); ++i) {
        const double gap = std::abs(algo.posterior().mean_at(i) - setup.objective.tilde_at(i));
        if (gap > rad * std::sqrt(algo.posterior().variance_at(i)) + 1e-9) {
          violated = true;
          break;
        }
      }
      if (violated) break;
      const int a = algo.select(full);
      const double y = observe(setup.objective, setup.noise, a, rng);
      algo.update(a, y);
    }
    if (violated) ++violating;
  }
  return CoverageResult{runs, violating, static_cast<double>(violating) / runs,
                        config.confidence.delta};
}

}  // namespace gpb
