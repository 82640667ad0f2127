#include "assistfair/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace assistfair {

namespace {

template <class T>
T get_as(const Json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field '" + key + "' has the wrong type: " + e.what());
  }
}

template <class T>
T get_field(const Json& doc, const std::string& key) {
  return get_as<T>(require_field(doc, key), key);
}

std::vector<PerGroup<double>> get_pairs(const Json& doc, const std::string& key) {
  const Json& arr = require_field(doc, key);
  if (!arr.is_array()) throw ConfigError("field '" + key + "' must be an array of [g0, g1] pairs");
  std::vector<PerGroup<double>> out;
  for (const auto& item : arr) {
    const auto pair = get_as<std::vector<double>>(item, key);
    if (pair.size() != 2) throw ConfigError("field '" + key + "' entries must have exactly two values");
    out.push_back({pair[0], pair[1]});
  }
  return out;
}

Json pairs_to_json(const std::vector<PerGroup<double>>& pairs) {
  Json arr = Json::array();
  for (const auto& p : pairs) arr.push_back({p[0], p[1]});
  return arr;
}

Json stat_json(const McStat& s) {
  Json j = {{"mean", s.mean}, {"reps", s.reps}};
  j["se"] = s.has_se() ? Json(s.se) : Json(nullptr);
  return j;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

const Json& require_field(const Json& doc, const std::string& key) {
  if (!doc.is_object()) throw ConfigError("expected a JSON object while reading '" + key + "'");
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) throw ConfigError("missing field '" + key + "'");
  return *it;
}

Json spec_to_json(const ProblemSpec& spec) {
  return Json{{"covariates", spec.covariates},
              {"group_probs", spec.group_probs},
              {"covariate_probs", spec.covariate_probs},
              {"true_means", pairs_to_json(spec.true_means)},
              {"noise_var", spec.noise_var}};
}

ProblemSpec spec_from_json(const Json& doc) {
  ProblemSpec spec;
  const Json& covs = require_field(doc, "covariates");
  if (!covs.is_array()) throw ConfigError("field 'covariates' must be an array");
  for (const auto& c : covs) {
    if (c.is_string()) {
      spec.covariates.push_back(c.get<std::string>());
    } else if (c.is_number_integer()) {
      spec.covariates.push_back(std::to_string(c.get<long long>()));
    } else {
      throw ConfigError("field 'covariates' entries must be strings or integers");
    }
  }
  spec.group_probs = get_field<std::vector<double>>(doc, "group_probs");
  spec.covariate_probs = get_field<std::vector<double>>(doc, "covariate_probs");
  spec.true_means = get_pairs(doc, "true_means");
  spec.noise_var = get_field<double>(doc, "noise_var");
  return spec;
}

Json training_to_json(const TrainingConfig& config) {
  Json counts = Json::array();
  for (const auto& c : config.counts) counts.push_back({c[0], c[1]});
  return Json{{"counts", counts}, {"seed", config.seed}};
}

TrainingConfig training_from_json(const Json& doc) {
  TrainingConfig config;
  const Json& counts = require_field(doc, "counts");
  if (!counts.is_array()) throw ConfigError("field 'counts' must be an array of [n0, n1] pairs");
  for (const auto& item : counts) {
    const auto pair = get_as<std::vector<long long>>(item, "counts");
    if (pair.size() != 2) throw ConfigError("field 'counts' entries must have exactly two values");
    if (pair[0] < 0 || pair[1] < 0) throw ConfigError("field 'counts' must be non-negative");
    config.counts.push_back({static_cast<std::size_t>(pair[0]), static_cast<std::size_t>(pair[1])});
  }
  config.seed = get_field<std::uint64_t>(doc, "seed");
  return config;
}

Json prior_to_json(const Prior& prior) {
  if (const auto* conj = std::get_if<ConjugateNormalPrior>(&prior)) {
    return Json{{"type", "conjugate_normal"}, {"beta", pairs_to_json(conj->beta)}, {"tau_sq", conj->tau_sq}};
  }
  const auto& grid = std::get<GridPrior>(prior);
  Json per_x = Json::array();
  for (const auto& points : grid.points) {
    Json arr = Json::array();
    for (const auto& p : points) arr.push_back({p.mu[0], p.mu[1], p.weight});
    per_x.push_back(std::move(arr));
  }
  return Json{{"type", "grid"}, {"points", per_x}};
}

Prior prior_from_json(const Json& doc) {
  const auto type = get_field<std::string>(doc, "type");
  if (type == "conjugate_normal") {
    return ConjugateNormalPrior{get_pairs(doc, "beta"), get_field<double>(doc, "tau_sq")};
  }
  if (type == "normal_grid") {
    const auto beta = get_pairs(doc, "beta");
    const auto tau_sq = get_field<double>(doc, "tau_sq");
    const auto points = get_field<std::size_t>(doc, "points_per_dim");
    const double width = doc.contains("half_width_sd") ? get_field<double>(doc, "half_width_sd") : 8.0;
    GridPrior grid;
    for (const auto& b : beta) grid.points.push_back(GridPrior::discretized_normal(b, tau_sq, points, width));
    return grid;
  }
  if (type == "grid") {
    const Json& per_x = require_field(doc, "points");
    if (!per_x.is_array()) throw ConfigError("field 'points' must be an array with one grid per covariate");
    GridPrior grid;
    for (const auto& arr : per_x) {
      std::vector<GridPoint> points;
      for (const auto& item : arr) {
        const auto triple = get_as<std::vector<double>>(item, "points");
        if (triple.size() != 3) throw ConfigError("grid points must be [mu0, mu1, weight] triples");
        points.push_back(GridPoint{{triple[0], triple[1]}, triple[2]});
      }
      grid.points.push_back(std::move(points));
    }
    return grid;
  }
  throw ConfigError("unknown prior type '" + type + "'");
}

Json predictions_to_json(const ProblemSpec& spec, const MachinePrediction& prediction) {
  Json rows = Json::array();
  for (std::size_t x = 0; x < prediction.size(); ++x) {
    for (int g = 0; g < 2; ++g) {
      if (!prediction.defined(x, g)) continue;
      const auto& c = prediction.cell_counts()[x];
      const std::size_t n = prediction.kind() == PredictionKind::kAware ? c[static_cast<std::size_t>(g)] : c[0] + c[1];
      rows.push_back({{"x", spec.covariates.at(x)}, {"g", g}, {"value", prediction.value(x, g)}, {"n", n}});
    }
  }
  return Json{{"kind", prediction.kind() == PredictionKind::kAware ? "AWARE" : "BLIND"}, {"rows", rows}};
}

void write_predictions_csv(std::ostream& os, const ProblemSpec& spec, const MachinePrediction& prediction) {
  os << "x,g,value,n\n";
  for (const auto& row : predictions_to_json(spec, prediction)["rows"]) {
    os << row["x"].get<std::string>() << ',' << row["g"].get<int>() << ','
       << format_number(row["value"].get<double>()) << ',' << row["n"].get<std::size_t>() << '\n';
  }
}

std::vector<CsvRow> metrics_rows(const MetricsReport& report) {
  constexpr double kNa = std::numeric_limits<double>::quiet_NaN();
  std::vector<CsvRow> rows;
  auto push = [&](const std::string& rule, const std::string& x, const std::string& q, const McStat& s) {
    rows.push_back({rule, x, q, s.mean, s.has_se() ? s.se : kNa});
  };
  for (const auto& r : report.rules) {
    const std::string rule(rule_name(r.kind));
    for (std::size_t x = 0; x < report.covariates.size(); ++x) {
      const std::string& cx = report.covariates[x];
      push(rule, cx, "disparity", r.disparity_by_x[x]);
      push(rule, cx, "risk", r.risk_by_x[x]);
      for (std::size_t g = 0; g < 2; ++g) {
        const std::string suffix = "_g" + std::to_string(g);
        push(rule, cx, "risk0" + suffix, r.risk0_by_cell[x][g]);
        push(rule, cx, "mean" + suffix, r.value_by_cell[x][g]);
        rows.push_back({rule, cx, "variance" + suffix, r.variance_by_cell[x][g], kNa});
      }
    }
    push(rule, "ALL", "avg_disparity", r.avg_disparity);
    push(rule, "ALL", "expected_risk", r.expected_risk);
    push(rule, "ALL", "excess_risk", r.excess_risk);
  }
  for (const auto& gap : report.gaps) {
    const std::string rule = std::string(rule_name(gap.minuend)) + "-" + std::string(rule_name(gap.subtrahend));
    for (std::size_t x = 0; x < report.covariates.size(); ++x) push(rule, report.covariates[x], "risk_gap", gap.by_x[x]);
    push(rule, "ALL", "expected_risk_gap", gap.overall);
  }
  return rows;
}

void write_metrics_csv(std::ostream& os, const std::vector<CsvRow>& rows, std::size_t reps, std::uint64_t seed) {
  os << kMetricsCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.rule << ',' << r.x << ',' << r.quantity << ',' << format_number(r.value) << ','
       << format_number(r.se) << ',' << reps << ',' << seed << '\n';
  }
}

Json metrics_to_json(const MetricsReport& report) {
  Json rules = Json::array();
  for (const auto& r : report.rules) {
    Json by_x = Json::array();
    for (std::size_t x = 0; x < report.covariates.size(); ++x) {
      Json cells = Json::array();
      for (std::size_t g = 0; g < 2; ++g) {
        cells.push_back({{"g", g},
                         {"risk0", stat_json(r.risk0_by_cell[x][g])},
                         {"mean", stat_json(r.value_by_cell[x][g])},
                         {"variance", std::isnan(r.variance_by_cell[x][g]) ? Json(nullptr) : Json(r.variance_by_cell[x][g])}});
      }
      by_x.push_back({{"x", report.covariates[x]},
                      {"disparity", stat_json(r.disparity_by_x[x])},
                      {"risk", stat_json(r.risk_by_x[x])},
                      {"cells", cells}});
    }
    rules.push_back({{"rule", rule_name(r.kind)},
                     {"by_x", by_x},
                     {"avg_disparity", stat_json(r.avg_disparity)},
                     {"expected_risk", stat_json(r.expected_risk)},
                     {"excess_risk", stat_json(r.excess_risk)}});
  }
  Json gaps = Json::array();
  for (const auto& gap : report.gaps) {
    Json by_x = Json::array();
    for (std::size_t x = 0; x < report.covariates.size(); ++x) {
      by_x.push_back({{"x", report.covariates[x]}, {"risk_gap", stat_json(gap.by_x[x])}});
    }
    gaps.push_back({{"minuend", rule_name(gap.minuend)},
                    {"subtrahend", rule_name(gap.subtrahend)},
                    {"by_x", by_x},
                    {"expected_risk_gap", stat_json(gap.overall)}});
  }
  return Json{{"covariates", report.covariates}, {"noise_var", report.noise_var}, {"seed", report.seed},
              {"reps", report.reps},             {"rules", rules},                {"risk_gaps", gaps}};
}

Json closed_form_to_json(const ClosedFormTable& table) {
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"rule", rule_name(r.rule)},
                    {"expected_disparity", r.expected_disparity},
                    {"expected_risk", r.expected_risk}});
  }
  const auto& p = table.params;
  return Json{{"inputs",
               {{"sigma_sq", table.sigma_sq},
                {"tau_sq", table.tau_sq},
                {"n", p.n},
                {"delta", p.delta},
                {"delta_mu", p.delta_mu},
                {"beta_bar", p.beta_bar},
                {"mu_bar", p.mu_bar}}},
              {"rows", rows}};
}

Json regime_to_json(const RegimeResult& regime) {
  Json j = {{"xi", regime.xi},
            {"regime", regime_name(regime.regime)},
            {"delta_mu", regime.delta_mu},
            {"sigma_sq", regime.sigma_sq},
            {"counts", {regime.counts[0], regime.counts[1]}}};
  j["delta_threshold"] = regime.delta_threshold ? Json(*regime.delta_threshold) : Json(nullptr);
  return j;
}

Json outcome_to_json(const VerificationOutcome& outcome, double level) {
  Json ineq = Json::array();
  for (const auto& i : outcome.inequalities) ineq.push_back({{"name", i.name}, {"fraction", i.fraction}});
  Json params = Json::object();
  for (const auto& p : outcome.parameters) params[p.name] = p.value;
  Json estimates = Json::object();
  for (const auto& e : outcome.estimates) estimates[e.name] = std::isnan(e.value) ? Json(nullptr) : Json(e.value);
  return Json{{"claim", claim_name(outcome.claim)},
              {"reps", outcome.reps},
              {"success_fraction", outcome.success_fraction},
              {"level", level},
              {"passed", outcome.success_fraction >= level},
              {"inequalities", ineq},
              {"parameters", params},
              {"estimates", estimates},
              {"notes", outcome.notes}};
}

Json consistency_to_json(const ConsistencyResult& result) {
  Json rows = Json::array();
  for (const auto& r : result.rows) rows.push_back({{"n", r.n}, {"median_abs_error", r.median_abs_error}});
  return Json{{"rows", rows},
              {"truth_in_support", result.truth_in_support},
              {"weakly_decreasing", result.weakly_decreasing},
              {"final_below_bound", result.final_below_bound},
              {"notes", result.notes}};
}

}  // namespace assistfair
