#pragma once

// Domain types for the data-generating process: ground truth, training
// design, decision-maker beliefs, and realized decision rules.
//
// Cells are addressed by (covariate index, group). Group is 0 or 1 and
// indexes the two-element arrays used throughout (`[0]` is g = 0).

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace assistfair {

template <class T>
using PerGroup = std::array<T, 2>;

using CellCounts = PerGroup<std::size_t>;

void check_group(int g);

struct ProblemSpec {
  std::vector<std::string> covariates;     // opaque identifiers
  std::vector<double> group_probs;         // P(G=1 | X=x)
  std::vector<double> covariate_probs;     // P(X=x)
  std::vector<PerGroup<double>> true_means;  // mu(x, g)
  double noise_var = 1.0;                  // sigma^2

  std::size_t size() const noexcept { return covariates.size(); }
  /// Index of a covariate identifier; throws ValidationError if unknown.
  std::size_t index_of(std::string_view covariate) const;
  double mean(std::size_t x, int g) const;
  /// P(G=g | X=x).
  double group_prob(std::size_t x, int g) const;

  bool operator==(const ProblemSpec&) const = default;
};

struct TrainingConfig {
  std::vector<CellCounts> counts;  // n(x, g)
  std::uint64_t seed = 0;

  std::size_t total(std::size_t x) const { return counts.at(x)[0] + counts.at(x)[1]; }

  bool operator==(const TrainingConfig&) const = default;
};

struct TrainingRecord {
  std::size_t x = 0;
  int g = 0;
  double y = 0.0;

  bool operator==(const TrainingRecord&) const = default;
};

struct TrainingSet {
  std::vector<TrainingRecord> records;
  std::vector<CellCounts> counts;

  bool operator==(const TrainingSet&) const = default;
};

/// mu(x, g) ~ N(beta(x, g), tau^2), independent across cells.
struct ConjugateNormalPrior {
  std::vector<PerGroup<double>> beta;
  double tau_sq = 1.0;

  bool operator==(const ConjugateNormalPrior&) const = default;
};

struct GridPoint {
  PerGroup<double> mu;  // (mu(x,0), mu(x,1))
  double weight = 0.0;

  bool operator==(const GridPoint&) const = default;
};

/// Discrete prior over mean pairs, one independent grid per covariate value.
struct GridPrior {
  std::vector<std::vector<GridPoint>> points;

  /// Product of two one-dimensional discrete marginals.
  static std::vector<GridPoint> product(const std::vector<double>& support0,
                                        const std::vector<double>& weights0,
                                        const std::vector<double>& support1,
                                        const std::vector<double>& weights1);

  /// Equally spaced discretization of N(mean, tau_sq) on mean +/- half_width_sd
  /// standard deviations. Returns (support, normalized weights).
  static std::pair<std::vector<double>, std::vector<double>> normal_marginal(
      double mean, double tau_sq, std::size_t points, double half_width_sd = 8.0);

  /// Product grid approximating an independent conjugate Normal prior at one x.
  static std::vector<GridPoint> discretized_normal(const PerGroup<double>& beta,
                                                   double tau_sq, std::size_t points_per_dim,
                                                   double half_width_sd = 8.0);

  bool operator==(const GridPrior&) const = default;
};

using Prior = std::variant<ConjugateNormalPrior, GridPrior>;

/// Parameters of the balanced single-covariate example.
struct DerivedExampleParams {
  double delta_mu = 0.0;  // mu(1) - mu(0)
  double mu_bar = 0.0;    // (mu(1) + mu(0)) / 2
  double delta = 0.0;     // beta(1) - beta(0)
  double beta_bar = 0.0;  // (beta(1) + beta(0)) / 2
  std::size_t n = 0;      // total sample size, n/2 per group

  bool operator==(const DerivedExampleParams&) const = default;
};

enum class RuleKind { kFMinus, kFPlus, kD0, kDMinus, kDPlus };

inline constexpr std::array<RuleKind, 5> kAllRules = {
    RuleKind::kFMinus, RuleKind::kFPlus, RuleKind::kD0, RuleKind::kDMinus, RuleKind::kDPlus};

std::string_view rule_name(RuleKind kind);
/// Accepts the canonical names (F_MINUS, ...) case-insensitively.
RuleKind parse_rule(std::string_view name);

struct DecisionRule {
  RuleKind kind = RuleKind::kD0;
  std::vector<PerGroup<double>> values;  // d(x, g)

  double at(std::size_t x, int g) const;
};

const ProblemSpec& validate_spec(const ProblemSpec& spec);
const TrainingConfig& validate_config(const ProblemSpec& spec, const TrainingConfig& config);
const Prior& validate_prior(const ProblemSpec& spec, const Prior& prior);

/// Count-weighted mean of the true cell means at x.
double weighted_mean_mu(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x);

/// Draws n(x,g) labels per cell, y = mu(x,g) + N(0, sigma^2). Records are
/// ordered by covariate, then group; the draw is a function of config.seed.
TrainingSet sample_training(const ProblemSpec& spec, const TrainingConfig& config);

/// Bernoulli(P(G=1|X=x)) draw from a dedicated seed.
int sample_deployment_group(const ProblemSpec& spec, std::size_t x, std::uint64_t seed);

/// Requires a conjugate prior and balanced counts at x.
DerivedExampleParams derive_example_params(const ProblemSpec& spec, const Prior& prior,
                                           const TrainingConfig& config, std::size_t x);

}  // namespace assistfair
