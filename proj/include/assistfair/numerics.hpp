#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace assistfair {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);
double compensated_mean(std::span<const double> values);

/// Welford accumulator. Two accumulators over disjoint ranges can be merged
/// (Chan et al.); merging in a fixed order gives a deterministic result.
class RunningStats {
 public:
  void add(double value) noexcept {
    ++count_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (value - mean_);
  }

  void merge(const RunningStats& other) noexcept;

  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; NaN with fewer than two observations.
  double variance() const noexcept {
    if (count_ < 2) return std::numeric_limits<double>::quiet_NaN();
    return m2_ / static_cast<double>(count_ - 1);
  }
  /// Standard error of the mean; NaN with fewer than two observations.
  double standard_error() const noexcept {
    return std::sqrt(variance() / static_cast<double>(count_));
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// log(sum(exp(v))) for finite or -inf entries; -inf for an all -inf input.
double log_sum_exp(std::span<const double> log_values);

/// Log density of N(mean, variance) at x.
inline double normal_log_pdf(double x, double mean, double variance) {
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  const double z = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + z * z / variance);
}

/// Median of a copy of the input (mean of the middle pair for even sizes).
double median(std::vector<double> values);

}  // namespace assistfair
