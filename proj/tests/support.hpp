#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "assistfair/model.hpp"
#include "assistfair/metrics.hpp"

namespace testing {

using namespace assistfair;

inline ProblemSpec one_cell(double mu0, double mu1, double sigma_sq = 1.0, double p = 0.5) {
  return ProblemSpec{{"x0"}, {p}, {1.0}, {{mu0, mu1}}, sigma_sq};
}

inline TrainingConfig cells(std::size_t n0, std::size_t n1, std::uint64_t seed = 1) {
  return TrainingConfig{{{n0, n1}}, seed};
}

inline ConjugateNormalPrior conj(double b0, double b1, double tau_sq) {
  return ConjugateNormalPrior{{{b0, b1}}, tau_sq};
}

// Balanced example fixture from the centred parameterisation.
struct Example {
  double sigma_sq = 1.0;
  double tau_sq = 1.0;
  std::size_t n = 8;
  double delta = 1.0;
  double delta_mu = 0.0;
  double beta_bar = 0.0;
  double mu_bar = 0.0;

  ProblemSpec spec() const { return one_cell(mu_bar - delta_mu / 2, mu_bar + delta_mu / 2, sigma_sq); }
  Prior prior() const { return conj(beta_bar - delta / 2, beta_bar + delta / 2, tau_sq); }
  TrainingConfig training(std::uint64_t seed = 1) const { return cells(n / 2, n / 2, seed); }
  DerivedExampleParams params() const { return {delta_mu, mu_bar, delta, beta_bar, n}; }
};

// Uniform parameter generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t count(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

// First-principles expectations for one cell with a conjugate prior. Each
// decision is affine in a Normal statistic, d = a + b * S with S ~ N(m, v),
// so E[d] = a + b m and Var(d) = b^2 v.
struct Affine {
  double mean = 0.0;
  double var = 0.0;
};

struct Moments {
  std::array<Affine, 2> by_group;

  double disparity() const { return by_group[1].mean - by_group[0].mean; }
  double risk(const std::array<double, 2>& mu, double p1, double sigma_sq) const {
    double r = 0.0;
    for (int g = 0; g < 2; ++g) {
      const double bias = by_group[g].mean - mu[g];
      r += (g == 1 ? p1 : 1.0 - p1) * (bias * bias + by_group[g].var + sigma_sq);
    }
    return r;
  }
};

inline Moments affine_moments(RuleKind kind, std::array<double, 2> mu, std::array<double, 2> beta,
                              std::array<double, 2> n, double sigma_sq, double tau_sq) {
  Moments m;
  const double total = n[0] + n[1];
  const std::array<double, 2> w{n[0] / total, n[1] / total};
  const double pooled_mean = w[0] * mu[0] + w[1] * mu[1];
  const double pooled_var = sigma_sq / total;
  for (int g = 0; g < 2; ++g) {
    Affine& a = m.by_group[g];
    switch (kind) {
      case RuleKind::kFMinus:
        a = {pooled_mean, pooled_var};
        break;
      case RuleKind::kFPlus:
        a = {mu[g], sigma_sq / n[g]};
        break;
      case RuleKind::kD0:
        a = {beta[g], 0.0};
        break;
      case RuleKind::kDPlus: {
        // Precision weighting of beta and the cell mean.
        const double b = tau_sq / (tau_sq + sigma_sq / n[g]);
        a = {(1 - b) * beta[g] + b * mu[g], b * b * sigma_sq / n[g]};
        break;
      }
      case RuleKind::kDMinus: {
        // Regression of mu_g on the pooled mean under the prior predictive.
        const double cov = w[g] * tau_sq;
        const double var = (w[0] * w[0] + w[1] * w[1]) * tau_sq + pooled_var;
        const double b = cov / var;
        const double prior_pooled = w[0] * beta[0] + w[1] * beta[1];
        a = {beta[g] + b * (pooled_mean - prior_pooled), b * b * pooled_var};
        break;
      }
    }
  }
  return m;
}

inline bool within_se(const McStat& s, double target, double k = 3.0) {
  if (s.se == 0.0) return std::abs(s.mean - target) <= 1e-12 * (1.0 + std::abs(target));
  return std::abs(s.mean - target) < k * s.se;
}

}  // namespace testing
