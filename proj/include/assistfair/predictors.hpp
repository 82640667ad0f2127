#pragma once

// Machine predictions as training-cell averages: the group-blind pooled mean
// per covariate and the group-aware mean per (covariate, group) cell.

#include <cstddef>
#include <vector>

#include "assistfair/model.hpp"

namespace assistfair {

enum class PredictionKind { kBlind, kAware };

class MachinePrediction {
 public:
  MachinePrediction(PredictionKind kind, std::vector<PerGroup<double>> values,
                    std::vector<PerGroup<bool>> defined, std::vector<CellCounts> counts);

  PredictionKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<CellCounts>& cell_counts() const noexcept { return counts_; }

  bool defined(std::size_t x, int g) const;
  /// Prediction served to an instance in cell (x, g); the blind prediction
  /// ignores g. Throws EmptyCellError for a cell without data.
  double value(std::size_t x, int g) const;

 private:
  PredictionKind kind_;
  std::vector<PerGroup<double>> values_;
  std::vector<PerGroup<bool>> defined_;
  std::vector<CellCounts> counts_;
};

MachinePrediction fit_group_blind(const TrainingSet& train);
MachinePrediction fit_group_aware(const TrainingSet& train);

}  // namespace assistfair
