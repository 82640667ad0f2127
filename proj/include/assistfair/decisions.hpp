#pragma once

// Human decision rules as posterior means of mu(x, g). The decision-maker
// conditions only on the prediction served for the instance's own cell:
// nothing (d0), the blind prediction f-(x) (d-), or the aware prediction
// f+(x, g) (d+). Both a closed-form conjugate Normal path and a discrete
// grid path are provided; the grid path accepts arbitrary priors.

#include <cstddef>

#include "assistfair/model.hpp"
#include "assistfair/predictors.hpp"

namespace assistfair {

enum class SignalKind { kNone, kBlind, kAware };

struct PosteriorSummary {
  double mean = 0.0;
  SignalKind signal_kind = SignalKind::kNone;
  std::size_t x = 0;
  int g = 0;
};

/// Prior mean E[mu(x,g)].
double decide_unassisted(const Prior& prior, std::size_t x, int g);

/// Inverse-variance weighting of beta(x,g) and the cell mean fplus.
double decide_assisted_aware_conjugate(const ConjugateNormalPrior& prior, double fplus,
                                       std::size_t n_cell, double sigma_sq, std::size_t x, int g);

/// E[mu(x,g) | f-(x)] by joint-Normal conditioning, where
/// f- | mu ~ N(w1 mu1 + w0 mu0, sigma^2 / (n0 + n1)) and w_g = n_g / (n0 + n1).
double decide_assisted_blind_conjugate(const ConjugateNormalPrior& prior, double fminus,
                                       const CellCounts& counts, double sigma_sq, std::size_t x,
                                       int g);

/// Reweights grid points by the N(mu_g, sigma^2 / n_cell) likelihood of fplus.
double grid_posterior_aware(const GridPrior& prior, double fplus, std::size_t n_cell,
                            double sigma_sq, std::size_t x, int g);

/// Reweights grid pairs by the likelihood of fminus at w1 mu1 + w0 mu0.
double grid_posterior_blind(const GridPrior& prior, double fminus, const CellCounts& counts,
                            double sigma_sq, std::size_t x, int g);

/// Variant dispatch over the two prior families.
double decide_assisted_aware(const Prior& prior, double fplus, std::size_t n_cell, double sigma_sq,
                             std::size_t x, int g);
double decide_assisted_blind(const Prior& prior, double fminus, const CellCounts& counts,
                             double sigma_sq, std::size_t x, int g);

/// Posterior mean at (x, g) given the prediction selected by `signal`.
PosteriorSummary posterior_mean(const Prior& prior, double sigma_sq, const MachinePrediction& blind,
                                const MachinePrediction& aware, SignalKind signal, std::size_t x,
                                int g);

/// Realizes one of the five rules on every cell. Machine rules copy the
/// predictions; human rules are posterior means.
DecisionRule build_rule(RuleKind kind, const Prior& prior, double sigma_sq,
                        const MachinePrediction& blind, const MachinePrediction& aware);

struct DisparityBound {
  double infimum = 0.0;
  bool unbounded_below = false;
};

/// Infimum over mu_bar of E[mu(x,1) - mu(x,0) | mu_bar(x)], with mu_bar the
/// count-weighted mean. Conjugate: closed form (unbounded below unless
/// n0 == n1). Grid: minimum over the mu_bar values realized on the support.
DisparityBound check_delta_disparate(const Prior& prior, const CellCounts& counts, std::size_t x);

}  // namespace assistfair
