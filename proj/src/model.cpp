#include "assistfair/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "assistfair/errors.hpp"
#include "assistfair/numerics.hpp"
#include "assistfair/rng.hpp"

namespace assistfair {

namespace {

constexpr double kProbabilitySumTolerance = 1e-12;

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

void check_group(int g) {
  if (g != 0 && g != 1) throw ValidationError("group must be 0 or 1, got " + std::to_string(g));
}

std::size_t ProblemSpec::index_of(std::string_view covariate) const {
  const auto it = std::find(covariates.begin(), covariates.end(), covariate);
  if (it == covariates.end()) {
    throw ValidationError("unknown covariate '" + std::string(covariate) + "'");
  }
  return static_cast<std::size_t>(it - covariates.begin());
}

double ProblemSpec::mean(std::size_t x, int g) const {
  check_group(g);
  if (x >= true_means.size()) throw ValidationError("covariate index out of range");
  return true_means[x][static_cast<std::size_t>(g)];
}

double ProblemSpec::group_prob(std::size_t x, int g) const {
  check_group(g);
  if (x >= group_probs.size()) throw ValidationError("covariate index out of range");
  return g == 1 ? group_probs[x] : 1.0 - group_probs[x];
}

std::vector<GridPoint> GridPrior::product(const std::vector<double>& support0,
                                          const std::vector<double>& weights0,
                                          const std::vector<double>& support1,
                                          const std::vector<double>& weights1) {
  require(support0.size() == weights0.size() && support1.size() == weights1.size(),
          "grid support and weight sizes differ");
  std::vector<GridPoint> grid;
  grid.reserve(support0.size() * support1.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < support0.size(); ++i) {
    for (std::size_t j = 0; j < support1.size(); ++j) {
      const double w = weights0[i] * weights1[j];
      grid.push_back(GridPoint{{support0[i], support1[j]}, w});
      total.add(w);
    }
  }
  const double norm = total.value();
  require(norm > 0.0, "grid weights sum to zero");
  for (auto& p : grid) p.weight /= norm;
  return grid;
}

std::pair<std::vector<double>, std::vector<double>> GridPrior::normal_marginal(
    double mean, double tau_sq, std::size_t points, double half_width_sd) {
  require(points >= 2, "normal grid needs at least two points");
  require(tau_sq > 0.0, "tau_sq must be positive");
  const double sd = std::sqrt(tau_sq);
  const double lo = mean - half_width_sd * sd;
  const double step = 2.0 * half_width_sd * sd / static_cast<double>(points - 1);
  std::vector<double> support(points);
  std::vector<double> weights(points);
  CompensatedSum total;
  for (std::size_t i = 0; i < points; ++i) {
    support[i] = lo + step * static_cast<double>(i);
    const double z = (support[i] - mean) / sd;
    weights[i] = std::exp(-0.5 * z * z);
    total.add(weights[i]);
  }
  const double norm = total.value();
  for (double& w : weights) w /= norm;
  return {std::move(support), std::move(weights)};
}

std::vector<GridPoint> GridPrior::discretized_normal(const PerGroup<double>& beta, double tau_sq,
                                                     std::size_t points_per_dim,
                                                     double half_width_sd) {
  auto [s0, w0] = normal_marginal(beta[0], tau_sq, points_per_dim, half_width_sd);
  auto [s1, w1] = normal_marginal(beta[1], tau_sq, points_per_dim, half_width_sd);
  return product(s0, w0, s1, w1);
}

std::string_view rule_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::kFMinus: return "F_MINUS";
    case RuleKind::kFPlus: return "F_PLUS";
    case RuleKind::kD0: return "D0";
    case RuleKind::kDMinus: return "D_MINUS";
    case RuleKind::kDPlus: return "D_PLUS";
  }
  return "?";
}

RuleKind parse_rule(std::string_view name) {
  const std::string key = upper(name);
  for (RuleKind kind : kAllRules) {
    if (rule_name(kind) == key) return kind;
  }
  throw ValidationError("unknown rule '" + std::string(name) + "'");
}

double DecisionRule::at(std::size_t x, int g) const {
  check_group(g);
  if (x >= values.size()) throw ValidationError("decision rule undefined at covariate index " + std::to_string(x));
  return values[x][static_cast<std::size_t>(g)];
}

const ProblemSpec& validate_spec(const ProblemSpec& spec) {
  const std::size_t k = spec.covariates.size();
  require(k > 0, "covariates must be non-empty");
  require(spec.group_probs.size() == k, "group_probs must have one entry per covariate");
  require(spec.covariate_probs.size() == k, "covariate_probs must have one entry per covariate");
  require(spec.true_means.size() == k, "true_means must have one (mu0, mu1) cell pair per covariate");
  require(std::set<std::string>(spec.covariates.begin(), spec.covariates.end()).size() == k,
          "covariate identifiers must be unique");
  require(std::isfinite(spec.noise_var) && spec.noise_var > 0.0, "noise_var must be positive");
  CompensatedSum total;
  for (std::size_t x = 0; x < k; ++x) {
    const double p = spec.group_probs[x];
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, "group_probs must lie in [0, 1]");
    const double q = spec.covariate_probs[x];
    require(std::isfinite(q) && q >= 0.0, "covariate_probs must be non-negative");
    total.add(q);
    for (double mu : spec.true_means[x]) require(std::isfinite(mu), "true_means must be finite");
  }
  require(std::abs(total.value() - 1.0) <= kProbabilitySumTolerance,
          "covariate_probs must sum to 1");
  return spec;
}

const TrainingConfig& validate_config(const ProblemSpec& spec, const TrainingConfig& config) {
  require(config.counts.size() == spec.size(), "counts must have one (n0, n1) pair per covariate");
  return config;
}

const Prior& validate_prior(const ProblemSpec& spec, const Prior& prior) {
  if (const auto* conj = std::get_if<ConjugateNormalPrior>(&prior)) {
    require(conj->beta.size() == spec.size(), "prior beta must have one (beta0, beta1) pair per covariate");
    require(std::isfinite(conj->tau_sq) && conj->tau_sq > 0.0, "tau_sq must be positive");
    for (const auto& b : conj->beta) {
      require(std::isfinite(b[0]) && std::isfinite(b[1]), "prior beta must be finite");
    }
    return prior;
  }
  const auto& grid = std::get<GridPrior>(prior);
  require(grid.points.size() == spec.size(), "grid prior must have one grid per covariate");
  for (const auto& points : grid.points) {
    require(!points.empty(), "grid prior must be non-empty");
    CompensatedSum total;
    for (const auto& p : points) {
      require(std::isfinite(p.weight) && p.weight >= 0.0, "grid weights must be non-negative");
      require(std::isfinite(p.mu[0]) && std::isfinite(p.mu[1]), "grid means must be finite");
      total.add(p.weight);
    }
    require(std::abs(total.value() - 1.0) <= kProbabilitySumTolerance, "grid weights must sum to 1");
  }
  return prior;
}

double weighted_mean_mu(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x) {
  const auto& n = config.counts.at(x);
  const std::size_t total = n[0] + n[1];
  if (total == 0) {
    throw EmptyCellError("no training observations at covariate '" + spec.covariates.at(x) + "'");
  }
  return (static_cast<double>(n[1]) * spec.mean(x, 1) + static_cast<double>(n[0]) * spec.mean(x, 0)) /
         static_cast<double>(total);
}

TrainingSet sample_training(const ProblemSpec& spec, const TrainingConfig& config) {
  validate_config(spec, config);
  TrainingSet set;
  set.counts = config.counts;
  std::size_t total = 0;
  for (const auto& n : config.counts) total += n[0] + n[1];
  set.records.reserve(total);

  Rng rng(config.seed);
  const double sd = std::sqrt(spec.noise_var);
  for (std::size_t x = 0; x < spec.size(); ++x) {
    for (int g = 0; g < 2; ++g) {
      const double mu = spec.mean(x, g);
      for (std::size_t i = 0; i < config.counts[x][static_cast<std::size_t>(g)]; ++i) {
        set.records.push_back(TrainingRecord{x, g, rng.normal(mu, sd)});
      }
    }
  }
  return set;
}

int sample_deployment_group(const ProblemSpec& spec, std::size_t x, std::uint64_t seed) {
  if (x >= spec.size()) throw ValidationError("unknown covariate index " + std::to_string(x));
  Rng rng(seed);
  return rng.uniform() < spec.group_probs[x] ? 1 : 0;
}

DerivedExampleParams derive_example_params(const ProblemSpec& spec, const Prior& prior,
                                           const TrainingConfig& config, std::size_t x) {
  const auto* conj = std::get_if<ConjugateNormalPrior>(&prior);
  if (conj == nullptr) throw ValidationError("example parameters require a conjugate Normal prior");
  const auto& n = config.counts.at(x);
  if (n[0] != n[1] || n[0] == 0) {
    throw ValidationError("example parameters require balanced, non-empty counts");
  }
  const auto& mu = spec.true_means.at(x);
  const auto& beta = conj->beta.at(x);
  return DerivedExampleParams{mu[1] - mu[0], 0.5 * (mu[1] + mu[0]), beta[1] - beta[0],
                              0.5 * (beta[1] + beta[0]), n[0] + n[1]};
}

}  // namespace assistfair
