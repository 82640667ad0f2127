#include "assistfair/predictors.hpp"

#include <string>

#include "assistfair/errors.hpp"
#include "assistfair/numerics.hpp"

namespace assistfair {

MachinePrediction::MachinePrediction(PredictionKind kind, std::vector<PerGroup<double>> values,
                                     std::vector<PerGroup<bool>> defined,
                                     std::vector<CellCounts> counts)
    : kind_(kind), values_(std::move(values)), defined_(std::move(defined)), counts_(std::move(counts)) {
  if (values_.size() != defined_.size() || values_.size() != counts_.size()) {
    throw ValidationError("prediction tables have inconsistent sizes");
  }
}

bool MachinePrediction::defined(std::size_t x, int g) const {
  check_group(g);
  return x < defined_.size() && defined_[x][static_cast<std::size_t>(g)];
}

double MachinePrediction::value(std::size_t x, int g) const {
  if (!defined(x, g)) {
    if (kind_ == PredictionKind::kAware) {
      throw EmptyCellError("group-aware prediction undefined for empty cell (x=" + std::to_string(x) +
                           ", g=" + std::to_string(g) + ")");
    }
    throw EmptyCellError("group-blind prediction undefined for covariate index " + std::to_string(x) +
                         " without observations");
  }
  return values_[x][static_cast<std::size_t>(g)];
}

namespace {

struct CellSums {
  std::vector<PerGroup<CompensatedSum>> sums;
  std::vector<CellCounts> counts;
};

CellSums accumulate(const TrainingSet& train) {
  CellSums out;
  out.sums.resize(train.counts.size());
  out.counts.assign(train.counts.size(), CellCounts{0, 0});
  for (const auto& r : train.records) {
    if (r.x >= out.sums.size()) throw ValidationError("training record covariate out of range");
    check_group(r.g);
    out.sums[r.x][static_cast<std::size_t>(r.g)].add(r.y);
    ++out.counts[r.x][static_cast<std::size_t>(r.g)];
  }
  if (out.counts != train.counts) throw ValidationError("training records disagree with cell counts");
  return out;
}

}  // namespace

MachinePrediction fit_group_blind(const TrainingSet& train) {
  const CellSums cells = accumulate(train);
  const std::size_t k = cells.counts.size();
  std::vector<PerGroup<double>> values(k, PerGroup<double>{0.0, 0.0});
  std::vector<PerGroup<bool>> defined(k, PerGroup<bool>{false, false});
  for (std::size_t x = 0; x < k; ++x) {
    const std::size_t total = cells.counts[x][0] + cells.counts[x][1];
    if (total == 0) continue;
    CompensatedSum pooled;
    pooled.add(cells.sums[x][0].value());
    pooled.add(cells.sums[x][1].value());
    const double mean = pooled.value() / static_cast<double>(total);
    values[x] = {mean, mean};
    defined[x] = {true, true};
  }
  return MachinePrediction(PredictionKind::kBlind, std::move(values), std::move(defined), cells.counts);
}

MachinePrediction fit_group_aware(const TrainingSet& train) {
  const CellSums cells = accumulate(train);
  const std::size_t k = cells.counts.size();
  std::vector<PerGroup<double>> values(k, PerGroup<double>{0.0, 0.0});
  std::vector<PerGroup<bool>> defined(k, PerGroup<bool>{false, false});
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t g = 0; g < 2; ++g) {
      const std::size_t n = cells.counts[x][g];
      if (n == 0) continue;
      values[x][g] = cells.sums[x][g].value() / static_cast<double>(n);
      defined[x][g] = true;
    }
  }
  return MachinePrediction(PredictionKind::kAware, std::move(values), std::move(defined), cells.counts);
}

}  // namespace assistfair
