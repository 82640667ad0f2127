#pragma once

// Closed-form expectations for the balanced two-group example and the regime
// thresholds separating trade-off from dominance. Everything here is exact
// arithmetic; no root finding.

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "assistfair/model.hpp"

namespace assistfair {

struct ClosedFormRow {
  RuleKind rule = RuleKind::kD0;
  double expected_disparity = 0.0;
  double expected_risk = 0.0;
};

struct ClosedFormTable {
  double sigma_sq = 0.0;
  double tau_sq = 0.0;
  DerivedExampleParams params;
  std::array<ClosedFormRow, 5> rows;  // in kAllRules order

  const ClosedFormRow& row(RuleKind kind) const;
};

/// Expected disparities and risks of all five rules in the balanced example
/// with P(G=1) = 1/2 and n/2 observations per group. Rejects odd or zero n.
ClosedFormTable example_closed_forms(double sigma_sq, double tau_sq, const DerivedExampleParams& params);

/// Text table with one row per rule, in the layout rule | E[Delta] | E[r].
std::string format_closed_form_table(const ClosedFormTable& table);

struct MachineRisks {
  double aware = 0.0;  // E[r_{f+}(x)]
  double blind = 0.0;  // E[r_{f-}(x)]
};

/// E[r_{f+}(x)] = sum_g P(g|x) sigma^2/n(x,g) + sigma^2 and
/// E[r_{f-}(x)] = sum_g P(g|x) (n(x,1-g)/n(x) Delta_mu)^2 + sigma^2/n(x) + sigma^2.
MachineRisks machine_risk_expectations(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x);

/// |Delta_mu| at which the two machine risks coincide. The risk gap is
/// quadratic in Delta_mu, so
///   xi = sqrt((sum_g P(g|x) sigma^2/n_g - sigma^2/n) / (sum_g P(g|x) (n_{1-g}/n)^2)).
double xi_threshold_general(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x);

enum class Regime { kTradeOff, kDominance, kBoundary };

std::string_view regime_name(Regime regime);

struct RegimeResult {
  double xi = 0.0;
  Regime regime = Regime::kDominance;
  double delta_mu = 0.0;
  double sigma_sq = 0.0;
  CellCounts counts{0, 0};
  std::optional<double> delta_threshold;  // only for the balanced example
};

/// Classifies |Delta_mu(x)| against xi: above is a trade-off, below is
/// dominance, equality is the boundary where the two risks are equal.
RegimeResult classify_machine_regime(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x);

/// delta above which d+ has strictly lower expected risk than d- in the
/// balanced example: Delta_mu + 2 tau sigma / sqrt(n tau^2 + 4 sigma^2).
double delta_threshold_example(double sigma_sq, double tau_sq, double n, double delta_mu);

/// Regime result for the balanced example, with the assistance threshold filled in.
RegimeResult example_regime(double sigma_sq, double tau_sq, std::size_t n, double delta_mu);

}  // namespace assistfair
