#include "assistfair/experiment.hpp"

#include <cmath>
#include <fstream>

#include "assistfair/oracle.hpp"

namespace assistfair {

namespace {

std::size_t to_count(double value, const std::string& name, std::size_t min) {
  if (!(value >= static_cast<double>(min)) || std::floor(value) != value) {
    throw ConfigError("parameter '" + name + "' must be an integer >= " + std::to_string(min));
  }
  return static_cast<std::size_t>(value);
}

ConjugateNormalPrior& conjugate(ExperimentConfig& config, const std::string& name) {
  auto* conj = std::get_if<ConjugateNormalPrior>(&config.prior);
  if (conj == nullptr) throw ConfigError("parameter '" + name + "' requires a conjugate_normal prior");
  return *conj;
}

// Rewrites a pair as centre +/- gap/2, replacing whichever of the two is named.
void set_centre_gap(PerGroup<double>& pair, std::optional<double> centre, std::optional<double> gap) {
  const double c = centre.value_or(0.5 * (pair[0] + pair[1]));
  const double d = gap.value_or(pair[1] - pair[0]);
  pair = {c - 0.5 * d, c + 0.5 * d};
}

SweepAxis axis_from_json(const Json& doc) {
  SweepAxis axis;
  axis.param = require_field(doc, "param").get<std::string>();
  if (doc.contains("values")) {
    axis.values = doc["values"].get<std::vector<double>>();
  } else if (doc.contains("range")) {
    const Json& r = doc["range"];
    const double from = require_field(r, "from").get<double>();
    const double to = require_field(r, "to").get<double>();
    const auto steps = require_field(r, "steps").get<std::size_t>();
    if (steps < 2) throw ConfigError("sweep range needs at least 2 steps");
    for (std::size_t i = 0; i < steps; ++i) {
      axis.values.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
    }
  } else {
    throw ConfigError("sweep axis '" + axis.param + "' needs 'values' or 'range'");
  }
  if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.param + "' has no values");
  const auto& names = sweep_parameters();
  if (std::find(names.begin(), names.end(), axis.param) == names.end()) {
    throw ConfigError("sweep axis references unknown parameter '" + axis.param + "'");
  }
  return axis;
}

}  // namespace

std::size_t ExperimentConfig::covariate_index() const {
  return covariate.empty() ? 0 : spec.index_of(covariate);
}

ExperimentConfig experiment_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  try {
    config.spec = spec_from_json(doc);
    config.training = training_from_json(doc);
    const Json& prior = require_field(doc, "prior");
    if (prior.is_string()) {
      const auto path = base_dir / prior.get<std::string>();
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open prior file '" + path.string() + "'");
      config.prior = prior_from_json(Json::parse(in));
    } else {
      config.prior = prior_from_json(prior);
    }
    if (doc.contains("reps")) config.reps = doc["reps"].get<std::size_t>();
    if (doc.contains("rules")) {
      config.rules.clear();
      for (const auto& r : doc["rules"]) config.rules.push_back(parse_rule(r.get<std::string>()));
    }
    if (doc.contains("out")) config.out = doc["out"].get<std::string>();
    if (doc.contains("level")) config.level = doc["level"].get<double>();
    if (doc.contains("x")) config.covariate = doc["x"].get<std::string>();
    if (doc.contains("zeta")) config.zeta = doc["zeta"].get<double>();
    if (doc.contains("sweep")) {
      for (const auto& a : require_field(doc["sweep"], "axes")) config.sweep.push_back(axis_from_json(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (config.reps == 0) throw ConfigError("reps must be at least 1");
  if (config.rules.empty()) throw ConfigError("rules must name at least one rule");
  validate_spec(config.spec);
  validate_config(config.spec, config.training);
  validate_prior(config.spec, config.prior);
  config.covariate_index();
  return config;
}

Json experiment_to_json(const ExperimentConfig& config) {
  Json doc = spec_to_json(config.spec);
  const Json training = training_to_json(config.training);
  for (const auto& [key, value] : training.items()) doc[key] = value;
  doc["prior"] = prior_to_json(config.prior);
  doc["reps"] = config.reps;
  Json rules = Json::array();
  for (RuleKind r : config.rules) rules.push_back(rule_name(r));
  doc["rules"] = rules;
  doc["out"] = config.out;
  doc["level"] = config.level;
  if (!config.covariate.empty()) doc["x"] = config.covariate;
  doc["zeta"] = config.zeta;
  if (!config.sweep.empty()) {
    Json axes = Json::array();
    for (const auto& a : config.sweep) axes.push_back({{"param", a.param}, {"values", a.values}});
    doc["sweep"] = {{"axes", axes}};
  }
  return doc;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return experiment_from_json(doc, path.parent_path());
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {"noise_var", "tau_sq", "n",     "n_per_group", "delta_mu",
                                                 "mu_bar",    "delta",  "beta_bar", "group_prob", "reps"};
  return names;
}

void apply_parameter(ExperimentConfig& config, const std::string& name, double value) {
  if (name == "noise_var") {
    config.spec.noise_var = value;
  } else if (name == "tau_sq") {
    conjugate(config, name).tau_sq = value;
  } else if (name == "n") {
    const std::size_t n = to_count(value, name, 2);
    if (n % 2 != 0) throw ConfigError("parameter 'n' is the balanced total and must be even");
    for (auto& c : config.training.counts) c = {n / 2, n / 2};
  } else if (name == "n_per_group") {
    const std::size_t n = to_count(value, name, 1);
    for (auto& c : config.training.counts) c = {n, n};
  } else if (name == "delta_mu") {
    for (auto& mu : config.spec.true_means) set_centre_gap(mu, std::nullopt, value);
  } else if (name == "mu_bar") {
    for (auto& mu : config.spec.true_means) set_centre_gap(mu, value, std::nullopt);
  } else if (name == "delta") {
    for (auto& b : conjugate(config, name).beta) set_centre_gap(b, std::nullopt, value);
  } else if (name == "beta_bar") {
    for (auto& b : conjugate(config, name).beta) set_centre_gap(b, value, std::nullopt);
  } else if (name == "group_prob") {
    for (auto& p : config.spec.group_probs) p = value;
  } else if (name == "reps") {
    config.reps = to_count(value, name, 1);
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "'");
  }
}

SweepResult run_sweep(const ExperimentConfig& config, const McOptions& options) {
  SweepResult result;
  for (const auto& a : config.sweep) result.axes.push_back(a.param);

  std::vector<std::size_t> index(config.sweep.size(), 0);
  const std::size_t x = config.covariate_index();
  while (true) {
    ExperimentConfig point = config;
    SweepPoint sp;
    for (std::size_t a = 0; a < config.sweep.size(); ++a) {
      const double v = config.sweep[a].values[index[a]];
      apply_parameter(point, config.sweep[a].param, v);
      sp.values.push_back(v);
    }
    validate_spec(point.spec);
    validate_prior(point.spec, point.prior);
    sp.report = mc_expected_metrics(point.spec, point.prior, point.training, point.rules, point.reps, options);
    const CellCounts& n = point.training.counts[x];
    if (n[0] > 0 && n[1] > 0) sp.xi = xi_threshold_general(point.spec, point.training, x);
    result.points.push_back(std::move(sp));

    // Odometer increment, last axis fastest.
    std::size_t a = config.sweep.size();
    while (a > 0) {
      --a;
      if (++index[a] < config.sweep[a].values.size()) break;
      index[a] = 0;
      if (a == 0) return result;
    }
    if (config.sweep.empty()) return result;
  }
}

}  // namespace assistfair
