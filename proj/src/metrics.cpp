#include "assistfair/metrics.hpp"

#include <cmath>
#include <limits>

#include "assistfair/decisions.hpp"
#include "assistfair/errors.hpp"
#include "assistfair/numerics.hpp"
#include "assistfair/parallel.hpp"
#include "assistfair/rng.hpp"

namespace assistfair {

namespace {

void require_coverage(const DecisionRule& rule, const ProblemSpec& spec) {
  if (rule.values.size() != spec.size()) {
    throw ValidationError("decision rule " + std::string(rule_name(rule.kind)) +
                          " does not cover every covariate of the problem");
  }
}

McStat to_stat(const RunningStats& s) {
  return McStat{s.mean(), s.count() >= 2 ? s.standard_error() : std::numeric_limits<double>::quiet_NaN(),
                s.count()};
}

struct RuleAccumulator {
  std::vector<RunningStats> disparity_by_x;
  RunningStats avg_disparity;
  std::vector<PerGroup<RunningStats>> risk0_by_cell;
  std::vector<RunningStats> risk_by_x;
  RunningStats expected_risk;
  RunningStats excess_risk;
  std::vector<PerGroup<RunningStats>> value_by_cell;

  explicit RuleAccumulator(std::size_t k = 0)
      : disparity_by_x(k), risk0_by_cell(k), risk_by_x(k), value_by_cell(k) {}

  void merge(const RuleAccumulator& o) {
    for (std::size_t x = 0; x < disparity_by_x.size(); ++x) {
      disparity_by_x[x].merge(o.disparity_by_x[x]);
      risk_by_x[x].merge(o.risk_by_x[x]);
      for (std::size_t g = 0; g < 2; ++g) {
        risk0_by_cell[x][g].merge(o.risk0_by_cell[x][g]);
        value_by_cell[x][g].merge(o.value_by_cell[x][g]);
      }
    }
    avg_disparity.merge(o.avg_disparity);
    expected_risk.merge(o.expected_risk);
    excess_risk.merge(o.excess_risk);
  }
};

struct GapAccumulator {
  std::vector<RunningStats> by_x;
  RunningStats overall;
};

struct McAccumulator {
  bool initialized = false;
  std::vector<RuleAccumulator> rules;
  std::vector<GapAccumulator> gaps;
};

struct GapPlan {
  RuleKind minuend;
  RuleKind subtrahend;
  std::size_t minuend_slot;
  std::size_t subtrahend_slot;
};

}  // namespace

double disparity(const DecisionRule& rule, std::size_t x) { return rule.at(x, 1) - rule.at(x, 0); }

double avg_disparity(const DecisionRule& rule, const ProblemSpec& spec) {
  require_coverage(rule, spec);
  CompensatedSum sum;
  for (std::size_t x = 0; x < spec.size(); ++x) sum.add(spec.covariate_probs[x] * disparity(rule, x));
  return sum.value();
}

double pointwise_risk(double rule_value, const ProblemSpec& spec, std::size_t x, int g) {
  const double err = rule_value - spec.mean(x, g);
  return err * err + spec.noise_var;
}

double risk_at_x(const DecisionRule& rule, const ProblemSpec& spec, std::size_t x) {
  return spec.group_prob(x, 1) * pointwise_risk(rule.at(x, 1), spec, x, 1) +
         spec.group_prob(x, 0) * pointwise_risk(rule.at(x, 0), spec, x, 0);
}

double expected_risk(const DecisionRule& rule, const ProblemSpec& spec) {
  require_coverage(rule, spec);
  CompensatedSum sum;
  for (std::size_t x = 0; x < spec.size(); ++x) sum.add(spec.covariate_probs[x] * risk_at_x(rule, spec, x));
  return sum.value();
}

RealizedMetrics realized_metrics(const DecisionRule& rule, const ProblemSpec& spec) {
  require_coverage(rule, spec);
  const std::size_t k = spec.size();
  RealizedMetrics m;
  m.disparity_by_x.resize(k);
  m.risk0_by_cell.resize(k);
  m.risk_by_x.resize(k);
  CompensatedSum avg;
  CompensatedSum risk;
  for (std::size_t x = 0; x < k; ++x) {
    m.disparity_by_x[x] = disparity(rule, x);
    for (int g = 0; g < 2; ++g) {
      m.risk0_by_cell[x][static_cast<std::size_t>(g)] = pointwise_risk(rule.at(x, g), spec, x, g);
    }
    m.risk_by_x[x] = spec.group_prob(x, 1) * m.risk0_by_cell[x][1] + spec.group_prob(x, 0) * m.risk0_by_cell[x][0];
    avg.add(spec.covariate_probs[x] * m.disparity_by_x[x]);
    risk.add(spec.covariate_probs[x] * m.risk_by_x[x]);
  }
  m.avg_disparity = avg.value();
  m.expected_risk = risk.value();
  return m;
}

const RuleMetrics& MetricsReport::rule(RuleKind kind) const {
  for (const auto& r : rules) {
    if (r.kind == kind) return r;
  }
  throw ValidationError("rule " + std::string(rule_name(kind)) + " not present in report");
}

const RiskGap* MetricsReport::gap(RuleKind minuend, RuleKind subtrahend) const {
  for (const auto& g : gaps) {
    if (g.minuend == minuend && g.subtrahend == subtrahend) return &g;
  }
  return nullptr;
}

ReplicationDraw draw_replication(const ProblemSpec& spec, const TrainingConfig& config,
                                 std::uint64_t master_seed, std::size_t rep) {
  TrainingConfig draw = config;
  draw.seed = mix_seed(master_seed, rep, Stream::kTraining);
  const TrainingSet train = sample_training(spec, draw);
  return ReplicationDraw{fit_group_blind(train), fit_group_aware(train)};
}

MetricsReport mc_expected_metrics(const ProblemSpec& spec, const Prior& prior,
                                  const TrainingConfig& config, const std::vector<RuleKind>& kinds,
                                  std::size_t reps, const McOptions& options) {
  validate_spec(spec);
  validate_config(spec, config);
  validate_prior(spec, prior);
  if (reps == 0) throw ValidationError("reps must be at least 1");
  if (kinds.empty()) throw ValidationError("at least one rule must be requested");

  const std::size_t k = spec.size();
  std::vector<GapPlan> plans;
  auto slot_of = [&](RuleKind kind) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (kinds[i] == kind) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  for (auto [a, b] : {std::pair{RuleKind::kFPlus, RuleKind::kFMinus},
                      std::pair{RuleKind::kDPlus, RuleKind::kDMinus}}) {
    const auto sa = slot_of(a);
    const auto sb = slot_of(b);
    if (sa >= 0 && sb >= 0) plans.push_back({a, b, static_cast<std::size_t>(sa), static_cast<std::size_t>(sb)});
  }

  auto init = [&](McAccumulator& acc) {
    if (acc.initialized) return;
    acc.rules.assign(kinds.size(), RuleAccumulator(k));
    acc.gaps.assign(plans.size(), GapAccumulator{std::vector<RunningStats>(k), {}});
    acc.initialized = true;
  };

  auto per_rep = [&](McAccumulator& acc, std::size_t rep) {
    init(acc);
    const ReplicationDraw draw = draw_replication(spec, config, config.seed, rep);
    std::vector<RealizedMetrics> realized;
    realized.reserve(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      const DecisionRule rule = build_rule(kinds[i], prior, spec.noise_var, draw.blind, draw.aware);
      RealizedMetrics m = realized_metrics(rule, spec);
      RuleAccumulator& ra = acc.rules[i];
      for (std::size_t x = 0; x < k; ++x) {
        ra.disparity_by_x[x].add(m.disparity_by_x[x]);
        ra.risk_by_x[x].add(m.risk_by_x[x]);
        for (std::size_t g = 0; g < 2; ++g) {
          ra.risk0_by_cell[x][g].add(m.risk0_by_cell[x][g]);
          ra.value_by_cell[x][g].add(rule.values[x][g]);
        }
      }
      ra.avg_disparity.add(m.avg_disparity);
      ra.expected_risk.add(m.expected_risk);
      ra.excess_risk.add(m.expected_risk - spec.noise_var);
      realized.push_back(std::move(m));
    }
    for (std::size_t p = 0; p < plans.size(); ++p) {
      const RealizedMetrics& a = realized[plans[p].minuend_slot];
      const RealizedMetrics& b = realized[plans[p].subtrahend_slot];
      for (std::size_t x = 0; x < k; ++x) acc.gaps[p].by_x[x].add(a.risk_by_x[x] - b.risk_by_x[x]);
      acc.gaps[p].overall.add(a.expected_risk - b.expected_risk);
    }
  };

  auto merge = [&](McAccumulator& total, const McAccumulator& part) {
    if (!part.initialized) return;
    init(total);
    for (std::size_t i = 0; i < kinds.size(); ++i) total.rules[i].merge(part.rules[i]);
    for (std::size_t p = 0; p < plans.size(); ++p) {
      for (std::size_t x = 0; x < k; ++x) total.gaps[p].by_x[x].merge(part.gaps[p].by_x[x]);
      total.gaps[p].overall.merge(part.gaps[p].overall);
    }
  };

  const McAccumulator acc = run_replication_blocks<McAccumulator>(reps, options.threads, per_rep, merge);

  MetricsReport report;
  report.covariates = spec.covariates;
  report.noise_var = spec.noise_var;
  report.seed = config.seed;
  report.reps = reps;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const RuleAccumulator& ra = acc.rules[i];
    RuleMetrics rm;
    rm.kind = kinds[i];
    rm.disparity_by_x.resize(k);
    rm.risk0_by_cell.resize(k);
    rm.risk_by_x.resize(k);
    rm.value_by_cell.resize(k);
    rm.variance_by_cell.resize(k);
    for (std::size_t x = 0; x < k; ++x) {
      rm.disparity_by_x[x] = to_stat(ra.disparity_by_x[x]);
      rm.risk_by_x[x] = to_stat(ra.risk_by_x[x]);
      for (std::size_t g = 0; g < 2; ++g) {
        rm.risk0_by_cell[x][g] = to_stat(ra.risk0_by_cell[x][g]);
        rm.value_by_cell[x][g] = to_stat(ra.value_by_cell[x][g]);
        rm.variance_by_cell[x][g] = ra.value_by_cell[x][g].variance();
      }
    }
    rm.avg_disparity = to_stat(ra.avg_disparity);
    rm.expected_risk = to_stat(ra.expected_risk);
    rm.excess_risk = to_stat(ra.excess_risk);
    report.rules.push_back(std::move(rm));
  }
  for (std::size_t p = 0; p < plans.size(); ++p) {
    RiskGap gap{plans[p].minuend, plans[p].subtrahend, {}, to_stat(acc.gaps[p].overall)};
    for (const auto& s : acc.gaps[p].by_x) gap.by_x.push_back(to_stat(s));
    report.gaps.push_back(std::move(gap));
  }
  return report;
}

std::vector<PerGroup<BiasVariance>> bias_variance_decomp(const ProblemSpec& spec, const Prior& prior,
                                                         const TrainingConfig& config, RuleKind kind,
                                                         std::size_t reps, const McOptions& options) {
  validate_spec(spec);
  validate_config(spec, config);
  validate_prior(spec, prior);
  if (reps < 2) throw ValidationError("bias/variance decomposition needs at least 2 replications");

  using Values = std::vector<PerGroup<double>>;
  const auto slots = run_replication_slots<Values>(reps, options.threads, [&](std::size_t rep) {
    const ReplicationDraw draw = draw_replication(spec, config, config.seed, rep);
    return build_rule(kind, prior, spec.noise_var, draw.blind, draw.aware).values;
  });

  const std::size_t k = spec.size();
  const double n = static_cast<double>(reps);
  std::vector<PerGroup<BiasVariance>> out(k);
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t g = 0; g < 2; ++g) {
      RunningStats stats;
      for (const auto& v : slots) stats.add(v[x][g]);
      CompensatedSum m4;
      for (const auto& v : slots) {
        const double d = v[x][g] - stats.mean();
        m4.add(d * d * d * d);
      }
      const double var = stats.variance();
      const double fourth = m4.value() / n;
      BiasVariance& bv = out[x][g];
      bv.bias = stats.mean() - spec.mean(x, static_cast<int>(g));
      bv.bias_se = stats.standard_error();
      bv.variance = var;
      bv.variance_se = std::sqrt(std::max(0.0, fourth - var * var) / n);
    }
  }
  return out;
}

}  // namespace assistfair
