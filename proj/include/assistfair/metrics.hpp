#pragma once

// Disparity and squared-error risk of decision rules, for one realized
// training draw and in expectation over draws by Monte Carlo. Expectations
// over (X, G) use the exact probabilities of the ProblemSpec; only the
// training data is resampled.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "assistfair/model.hpp"
#include "assistfair/predictors.hpp"

namespace assistfair {

double disparity(const DecisionRule& rule, std::size_t x);
double avg_disparity(const DecisionRule& rule, const ProblemSpec& spec);
/// (value - mu(x,g))^2 + sigma^2.
double pointwise_risk(double rule_value, const ProblemSpec& spec, std::size_t x, int g);
double risk_at_x(const DecisionRule& rule, const ProblemSpec& spec, std::size_t x);
double expected_risk(const DecisionRule& rule, const ProblemSpec& spec);

struct RealizedMetrics {
  std::vector<double> disparity_by_x;
  double avg_disparity = 0.0;
  std::vector<PerGroup<double>> risk0_by_cell;
  std::vector<double> risk_by_x;
  double expected_risk = 0.0;
};

RealizedMetrics realized_metrics(const DecisionRule& rule, const ProblemSpec& spec);

/// Monte Carlo mean with its standard error (NaN when reps < 2).
struct McStat {
  double mean = 0.0;
  double se = 0.0;
  std::size_t reps = 0;

  bool has_se() const noexcept { return reps >= 2; }
};

struct RuleMetrics {
  RuleKind kind = RuleKind::kD0;
  std::vector<McStat> disparity_by_x;
  McStat avg_disparity;
  std::vector<PerGroup<McStat>> risk0_by_cell;
  std::vector<McStat> risk_by_x;
  McStat expected_risk;
  McStat excess_risk;  // expected_risk - sigma^2
  std::vector<PerGroup<McStat>> value_by_cell;
  std::vector<PerGroup<double>> variance_by_cell;
};

/// Paired difference of risks, minuend - subtrahend, per replication.
struct RiskGap {
  RuleKind minuend = RuleKind::kFPlus;
  RuleKind subtrahend = RuleKind::kFMinus;
  std::vector<McStat> by_x;
  McStat overall;
};

struct MetricsReport {
  std::vector<std::string> covariates;
  double noise_var = 0.0;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::vector<RuleMetrics> rules;
  std::vector<RiskGap> gaps;  // F_PLUS - F_MINUS and D_PLUS - D_MINUS when both present

  const RuleMetrics& rule(RuleKind kind) const;
  const RiskGap* gap(RuleKind minuend, RuleKind subtrahend) const;
};

struct McOptions {
  unsigned threads = 1;
};

/// Predictions fitted on the training draw of replication `rep`, seeded from
/// (master_seed, rep, training stream).
struct ReplicationDraw {
  MachinePrediction blind;
  MachinePrediction aware;
};

ReplicationDraw draw_replication(const ProblemSpec& spec, const TrainingConfig& config,
                                 std::uint64_t master_seed, std::size_t rep);

/// Resamples the training data `reps` times with master seed config.seed and
/// averages the realized metrics of each requested rule.
MetricsReport mc_expected_metrics(const ProblemSpec& spec, const Prior& prior,
                                  const TrainingConfig& config, const std::vector<RuleKind>& kinds,
                                  std::size_t reps, const McOptions& options = {});

struct BiasVariance {
  double bias = 0.0;      // E[d(x,g)] - mu(x,g)
  double bias_se = 0.0;
  double variance = 0.0;  // across replications
  double variance_se = 0.0;
};

std::vector<PerGroup<BiasVariance>> bias_variance_decomp(const ProblemSpec& spec, const Prior& prior,
                                                         const TrainingConfig& config, RuleKind kind,
                                                         std::size_t reps, const McOptions& options = {});

}  // namespace assistfair
