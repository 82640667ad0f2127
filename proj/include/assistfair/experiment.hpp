#pragma once

// Experiment configuration documents and parameter sweeps driven by them.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "assistfair/io.hpp"
#include "assistfair/metrics.hpp"
#include "assistfair/model.hpp"

namespace assistfair {

struct SweepAxis {
  std::string param;
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

struct ExperimentConfig {
  ProblemSpec spec;
  TrainingConfig training;
  Prior prior;
  std::size_t reps = 1000;
  std::vector<RuleKind> rules{kAllRules.begin(), kAllRules.end()};
  std::string out = "out";
  double level = 0.95;
  std::string covariate;  // empty selects the first covariate
  double zeta = 0.25;
  std::vector<SweepAxis> sweep;

  std::size_t covariate_index() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a config document. A string-valued `prior` is read as a path to a
/// prior document, relative to `base_dir`.
ExperimentConfig experiment_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
Json experiment_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Names accepted on sweep axes.
const std::vector<std::string>& sweep_parameters();

/// Sets a scalar parameter on every covariate. `n` is the balanced total
/// (n/2 per group), `delta_mu` and `mu_bar` move the true means keeping the
/// other fixed, `delta` and `beta_bar` do the same for a conjugate prior.
void apply_parameter(ExperimentConfig& config, const std::string& name, double value);

struct SweepPoint {
  std::vector<double> values;  // one per axis
  MetricsReport report;
  std::optional<double> xi;    // machine regime threshold at the selected covariate
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepPoint> points;
};

/// Cartesian product of the axes, first axis slowest. Every point reuses the
/// config seed, so neighbouring points share random numbers.
SweepResult run_sweep(const ExperimentConfig& config, const McOptions& options);

}  // namespace assistfair
