#include "assistfair/decisions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "assistfair/errors.hpp"
#include "assistfair/numerics.hpp"

namespace assistfair {

namespace {

const PerGroup<double>& beta_at(const ConjugateNormalPrior& prior, std::size_t x) {
  if (x >= prior.beta.size()) throw ValidationError("prior undefined at covariate index " + std::to_string(x));
  return prior.beta[x];
}

const std::vector<GridPoint>& grid_at(const GridPrior& prior, std::size_t x) {
  if (x >= prior.points.size()) throw ValidationError("grid prior undefined at covariate index " + std::to_string(x));
  return prior.points[x];
}

PerGroup<double> count_weights(const CellCounts& counts) {
  const std::size_t total = counts[0] + counts[1];
  if (total == 0) throw EmptyCellError("blind update needs at least one observation at x");
  const double n = static_cast<double>(total);
  return {static_cast<double>(counts[0]) / n, static_cast<double>(counts[1]) / n};
}

// Posterior mean of mu_g when point i carries likelihood N(signal; mean_i, var).
template <class MeanOf>
double grid_posterior(const std::vector<GridPoint>& grid, double signal, double variance, int g,
                      MeanOf mean_of) {
  if (!std::isfinite(signal)) throw SupportError("signal outside prior support");
  std::vector<double> log_w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GridPoint& p = grid[i];
    log_w[i] = p.weight > 0.0 ? std::log(p.weight) + normal_log_pdf(signal, mean_of(p), variance)
                              : -std::numeric_limits<double>::infinity();
  }
  const double log_norm = log_sum_exp(log_w);
  if (!std::isfinite(log_norm)) throw SupportError("signal outside prior support");
  CompensatedSum mean;
  const auto gi = static_cast<std::size_t>(g);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = std::exp(log_w[i] - log_norm);
    if (w > 0.0) mean.add(w * grid[i].mu[gi]);
  }
  return mean.value();
}

}  // namespace

double decide_unassisted(const Prior& prior, std::size_t x, int g) {
  check_group(g);
  const auto gi = static_cast<std::size_t>(g);
  if (const auto* conj = std::get_if<ConjugateNormalPrior>(&prior)) return beta_at(*conj, x)[gi];
  CompensatedSum mean;
  for (const auto& p : grid_at(std::get<GridPrior>(prior), x)) mean.add(p.weight * p.mu[gi]);
  return mean.value();
}

double decide_assisted_aware_conjugate(const ConjugateNormalPrior& prior, double fplus,
                                       std::size_t n_cell, double sigma_sq, std::size_t x, int g) {
  check_group(g);
  if (n_cell == 0) throw EmptyCellError("aware update needs n(x,g) >= 1");
  const double beta = beta_at(prior, x)[static_cast<std::size_t>(g)];
  const double n = static_cast<double>(n_cell);
  return (sigma_sq * beta + prior.tau_sq * n * fplus) / (sigma_sq + n * prior.tau_sq);
}

double decide_assisted_blind_conjugate(const ConjugateNormalPrior& prior, double fminus,
                                       const CellCounts& counts, double sigma_sq, std::size_t x,
                                       int g) {
  check_group(g);
  const PerGroup<double> w = count_weights(counts);
  const auto& beta = beta_at(prior, x);
  const double total = static_cast<double>(counts[0] + counts[1]);
  const double predictive_mean = w[1] * beta[1] + w[0] * beta[0];
  const double predictive_var = (w[1] * w[1] + w[0] * w[0]) * prior.tau_sq + sigma_sq / total;
  const auto gi = static_cast<std::size_t>(g);
  return beta[gi] + w[gi] * prior.tau_sq * (fminus - predictive_mean) / predictive_var;
}

double grid_posterior_aware(const GridPrior& prior, double fplus, std::size_t n_cell,
                            double sigma_sq, std::size_t x, int g) {
  check_group(g);
  if (n_cell == 0) throw EmptyCellError("aware update needs n(x,g) >= 1");
  const auto gi = static_cast<std::size_t>(g);
  return grid_posterior(grid_at(prior, x), fplus, sigma_sq / static_cast<double>(n_cell), g,
                        [gi](const GridPoint& p) { return p.mu[gi]; });
}

double grid_posterior_blind(const GridPrior& prior, double fminus, const CellCounts& counts,
                            double sigma_sq, std::size_t x, int g) {
  check_group(g);
  const PerGroup<double> w = count_weights(counts);
  const double total = static_cast<double>(counts[0] + counts[1]);
  return grid_posterior(grid_at(prior, x), fminus, sigma_sq / total, g,
                        [w](const GridPoint& p) { return w[1] * p.mu[1] + w[0] * p.mu[0]; });
}

double decide_assisted_aware(const Prior& prior, double fplus, std::size_t n_cell, double sigma_sq,
                             std::size_t x, int g) {
  if (const auto* conj = std::get_if<ConjugateNormalPrior>(&prior)) {
    return decide_assisted_aware_conjugate(*conj, fplus, n_cell, sigma_sq, x, g);
  }
  return grid_posterior_aware(std::get<GridPrior>(prior), fplus, n_cell, sigma_sq, x, g);
}

double decide_assisted_blind(const Prior& prior, double fminus, const CellCounts& counts,
                             double sigma_sq, std::size_t x, int g) {
  if (const auto* conj = std::get_if<ConjugateNormalPrior>(&prior)) {
    return decide_assisted_blind_conjugate(*conj, fminus, counts, sigma_sq, x, g);
  }
  return grid_posterior_blind(std::get<GridPrior>(prior), fminus, counts, sigma_sq, x, g);
}

PosteriorSummary posterior_mean(const Prior& prior, double sigma_sq, const MachinePrediction& blind,
                                const MachinePrediction& aware, SignalKind signal, std::size_t x,
                                int g) {
  PosteriorSummary out{0.0, signal, x, g};
  switch (signal) {
    case SignalKind::kNone:
      out.mean = decide_unassisted(prior, x, g);
      break;
    case SignalKind::kBlind:
      out.mean = decide_assisted_blind(prior, blind.value(x, g), blind.cell_counts().at(x), sigma_sq, x, g);
      break;
    case SignalKind::kAware:
      out.mean = decide_assisted_aware(prior, aware.value(x, g),
                                       aware.cell_counts().at(x)[static_cast<std::size_t>(g)], sigma_sq, x, g);
      break;
  }
  if (!std::isfinite(out.mean)) throw SupportError("posterior mean is not finite");
  return out;
}

DecisionRule build_rule(RuleKind kind, const Prior& prior, double sigma_sq,
                        const MachinePrediction& blind, const MachinePrediction& aware) {
  const std::size_t k = blind.size();
  if (aware.size() != k) throw ValidationError("blind and aware predictions cover different covariates");
  DecisionRule rule{kind, std::vector<PerGroup<double>>(k)};
  for (std::size_t x = 0; x < k; ++x) {
    for (int g = 0; g < 2; ++g) {
      double& out = rule.values[x][static_cast<std::size_t>(g)];
      switch (kind) {
        case RuleKind::kFMinus: out = blind.value(x, g); break;
        case RuleKind::kFPlus: out = aware.value(x, g); break;
        case RuleKind::kD0:
          out = posterior_mean(prior, sigma_sq, blind, aware, SignalKind::kNone, x, g).mean;
          break;
        case RuleKind::kDMinus:
          out = posterior_mean(prior, sigma_sq, blind, aware, SignalKind::kBlind, x, g).mean;
          break;
        case RuleKind::kDPlus:
          out = posterior_mean(prior, sigma_sq, blind, aware, SignalKind::kAware, x, g).mean;
          break;
      }
    }
  }
  return rule;
}

DisparityBound check_delta_disparate(const Prior& prior, const CellCounts& counts, std::size_t x) {
  const PerGroup<double> w = count_weights(counts);
  if (const auto* conj = std::get_if<ConjugateNormalPrior>(&prior)) {
    const auto& beta = beta_at(*conj, x);
    // E[mu1 - mu0 | mu_bar] is linear in mu_bar with slope (w1 - w0) / (w1^2 + w0^2).
    if (counts[0] != counts[1]) {
      return {-std::numeric_limits<double>::infinity(), true};
    }
    return {beta[1] - beta[0], false};
  }

  const auto& grid = grid_at(std::get<GridPrior>(prior), x);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].weight > 0.0) order.emplace_back(w[1] * grid[i].mu[1] + w[0] * grid[i].mu[0], i);
  }
  if (order.empty()) throw SupportError("grid prior has no mass at covariate index " + std::to_string(x));
  std::sort(order.begin(), order.end());

  // Points whose mu_bar agree up to rounding form one conditioning event.
  double infimum = std::numeric_limits<double>::infinity();
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           order[end].first - order[start].first <= 1e-9 * std::max(1.0, std::abs(order[start].first))) {
      ++end;
    }
    CompensatedSum mass;
    CompensatedSum gap;
    for (std::size_t j = start; j < end; ++j) {
      const GridPoint& p = grid[order[j].second];
      mass.add(p.weight);
      gap.add(p.weight * (p.mu[1] - p.mu[0]));
    }
    infimum = std::min(infimum, gap.value() / mass.value());
    start = end;
  }
  return {infimum, false};
}

}  // namespace assistfair
