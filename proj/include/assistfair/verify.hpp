#pragma once

// Monte Carlo verification of the disparity-reversal and trade-off claims.
// Each verifier resamples the training data, realizes the relevant rules and
// counts the replications in which the claimed inequality chain holds.
// Strict inequalities count ties as failures; weak inequalities accept ties
// up to a relative rounding tolerance of 1e-12.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "assistfair/model.hpp"

namespace assistfair {

enum class ClaimId { kRemark1, kRemark2, kRemark3, kTheorem1, kCorollary1, kTheorem2 };

std::string_view claim_name(ClaimId claim);
/// Accepts REMARK1..3, THM1, COR1, THM2 case-insensitively.
ClaimId parse_claim(std::string_view name);

struct NamedFraction {
  std::string name;
  double fraction = 0.0;
};

struct NamedValue {
  std::string name;
  double value = 0.0;
};

struct VerificationOutcome {
  ClaimId claim = ClaimId::kTheorem1;
  std::size_t reps = 0;
  double success_fraction = 0.0;
  std::vector<NamedFraction> inequalities;
  std::vector<NamedValue> parameters;
  std::vector<NamedValue> estimates;
  std::vector<std::string> notes;

  /// e.g. "THM1 PASS success_fraction=0.998 (level 0.95, reps 1000)".
  std::string summary_line(double level) const;
};

struct VerifyOptions {
  std::size_t x = 0;     // covariate index under test
  std::size_t reps = 1000;
  unsigned threads = 1;
  double zeta = 0.25;    // balance margin for the trade-off reversal
};

/// Delta_{d+}(x) < delta <= Delta_{d-}(x), Delta_{d0}(x), with delta taken
/// from check_delta_disparate. Requires 0 <= Delta_mu(x) < delta.
VerificationOutcome verify_disparity_reversal(const ProblemSpec& spec, const Prior& prior,
                                              const TrainingConfig& config, const VerifyOptions& options);

/// |Delta_{d-}|, |Delta_{d0}| > |Delta_{d+}|, |Delta_{f+}| > |Delta_{f-}|.
VerificationOutcome verify_reordering(const ProblemSpec& spec, const Prior& prior,
                                      const TrainingConfig& config, const VerifyOptions& options);

/// Delta_{d+} < Delta_{d-}, r_{d+}(x) < r_{d-}(x), Delta_{f+} > Delta_{f-} and
/// r0_{f+}(x,g) < r0_{f-}(x,g) for both g. Requires 0 < Delta_mu(x) < delta
/// and zeta <= n(x,g)/n(x) <= 1 - zeta.
VerificationOutcome verify_tradeoff_reversal(const ProblemSpec& spec, const Prior& prior,
                                             const TrainingConfig& config, const VerifyOptions& options);

/// Monte Carlo machine risks at x against the closed-form expectations and
/// the trade-off/dominance classification.
VerificationOutcome verify_machine_regimes(const ProblemSpec& spec, const TrainingConfig& config,
                                           const VerifyOptions& options);

/// Balanced conjugate example: Delta_{d-} = Delta_{d0} = delta and
/// Delta_{f-} = 0 in every replication; E[Delta_{d+}] matches its closed form
/// and lies below delta.
VerificationOutcome verify_example_reversal(const ProblemSpec& spec, const Prior& prior,
                                            const TrainingConfig& config, const VerifyOptions& options);

/// Balanced conjugate example: Monte Carlo risks of the four machine and
/// assisted rules agree with the closed forms and with the xi and delta
/// thresholds.
VerificationOutcome verify_example_tradeoff(const ProblemSpec& spec, const Prior& prior,
                                            const TrainingConfig& config, const VerifyOptions& options);

/// Dispatch by claim identifier.
VerificationOutcome verify_claim(ClaimId claim, const ProblemSpec& spec, const Prior& prior,
                                 const TrainingConfig& config, const VerifyOptions& options);

struct ConsistencyOptions {
  std::size_t x = 0;
  int g = 1;
  std::size_t reps = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double bound = 0.05;   // required median error at the largest n
  double slack = 0.02;   // relative increase tolerated between successive medians
};

struct ConsistencyRow {
  std::size_t n = 0;
  double median_abs_error = 0.0;
};

struct ConsistencyResult {
  std::vector<ConsistencyRow> rows;
  bool truth_in_support = true;
  bool weakly_decreasing = true;
  bool final_below_bound = true;
  std::vector<std::string> notes;
};

/// Median |d+(x,g) - mu(x,g)| under a grid prior for each cell size in n_grid.
ConsistencyResult verify_consistency(const GridPrior& prior, const ProblemSpec& spec,
                                     const std::vector<std::size_t>& n_grid,
                                     const ConsistencyOptions& options);

}  // namespace assistfair
