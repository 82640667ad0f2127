#pragma once

// JSON and CSV encodings of the domain types and reports.
//
// Config documents are flat JSON objects with the keys `covariates`,
// `group_probs`, `covariate_probs`, `true_means`, `noise_var`, `counts`,
// `seed` and `prior`. Per-covariate pairs are written in group order
// [g=0, g=1]. Priors are tagged by `type`:
//   {"type": "conjugate_normal", "beta": [[b0, b1], ...], "tau_sq": t}
//   {"type": "grid", "points": [[[mu0, mu1, w], ...], ...]}
//   {"type": "normal_grid", "beta": ..., "tau_sq": t, "points_per_dim": k,
//    "half_width_sd": 8}   (expanded to a grid when read)

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "assistfair/errors.hpp"
#include "assistfair/metrics.hpp"
#include "assistfair/model.hpp"
#include "assistfair/oracle.hpp"
#include "assistfair/predictors.hpp"
#include "assistfair/verify.hpp"

namespace assistfair {

using Json = nlohmann::json;

// A configuration document is missing a field or has the wrong shape.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Shortest round-trip decimal form; "NA" for NaN.
std::string format_number(double value);

Json spec_to_json(const ProblemSpec& spec);
ProblemSpec spec_from_json(const Json& doc);
Json training_to_json(const TrainingConfig& config);
TrainingConfig training_from_json(const Json& doc);
Json prior_to_json(const Prior& prior);
Prior prior_from_json(const Json& doc);

/// Reads a required field, throwing ConfigError("missing field '<key>'").
const Json& require_field(const Json& doc, const std::string& key);

Json predictions_to_json(const ProblemSpec& spec, const MachinePrediction& prediction);
/// Header `x,g,value,n`; empty cells are omitted.
void write_predictions_csv(std::ostream& os, const ProblemSpec& spec, const MachinePrediction& prediction);

inline const char* kMetricsCsvHeader = "rule,x,quantity,value,se,reps,seed";

struct CsvRow {
  std::string rule;
  std::string x;
  std::string quantity;
  double value = 0.0;
  double se = 0.0;  // NaN when not available
};

/// One row per (rule, covariate, quantity); covariate "ALL" for averages.
std::vector<CsvRow> metrics_rows(const MetricsReport& report);
void write_metrics_csv(std::ostream& os, const std::vector<CsvRow>& rows, std::size_t reps, std::uint64_t seed);
Json metrics_to_json(const MetricsReport& report);

Json closed_form_to_json(const ClosedFormTable& table);
Json regime_to_json(const RegimeResult& regime);
Json outcome_to_json(const VerificationOutcome& outcome, double level);
Json consistency_to_json(const ConsistencyResult& result);

}  // namespace assistfair
