#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "assistfair/numerics.hpp"
#include "assistfair/rng.hpp"
#include "support.hpp"

using namespace assistfair;

TEST_CASE("compensated sum recovers digits lost by naive summation") {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
  std::vector<double> tenths(10, 0.1);
  CHECK(compensated_sum(tenths) == 1.0);
  CHECK(compensated_mean(tenths) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("running stats match a two-pass computation") {
  testing::Gen gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = gen.count(2, 300);
    std::vector<double> v(n);
    for (auto& x : v) x = gen.real(-5.0, 5.0) + 1e3;
    RunningStats s;
    for (double x : v) s.add(x);
    const double mean = compensated_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(s.count() == n);
    CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-13));
    CHECK(s.variance() == doctest::Approx(ss / static_cast<double>(n - 1)).epsilon(1e-10));
  }
}

TEST_CASE("merging accumulators equals sequential accumulation") {
  testing::Gen gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = gen.count(0, 200);
    const std::size_t cut = gen.count(0, n);
    RunningStats all, left, right;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = gen.real(-3.0, 7.0);
      all.add(x);
      (i < cut ? left : right).add(x);
    }
    left.merge(right);
    CHECK(left.count() == all.count());
    if (n > 0) CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
    if (n > 1) CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
  }
}

TEST_CASE("variance and standard error need two observations") {
  RunningStats s;
  s.add(1.0);
  CHECK(std::isnan(s.variance()));
  CHECK(std::isnan(s.standard_error()));
  s.add(3.0);
  CHECK(s.variance() == 2.0);
  CHECK(s.standard_error() == doctest::Approx(1.0));
}

TEST_CASE("log_sum_exp") {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  std::vector<double> mixed{-inf, 0.0, -inf};
  CHECK(log_sum_exp(mixed) == 0.0);
  std::vector<double> none{-inf, -inf};
  CHECK(log_sum_exp(none) == -inf);
  std::vector<double> small{-1e4, -1e4 + std::log(3.0)};
  CHECK(log_sum_exp(small) == doctest::Approx(-1e4 + std::log(4.0)));
}

TEST_CASE("normal log density") {
  CHECK(normal_log_pdf(0.0, 0.0, 1.0) == doctest::Approx(-0.5 * std::log(2 * M_PI)));
  CHECK(normal_log_pdf(3.0, 1.0, 4.0) == doctest::Approx(-0.5 * std::log(8 * M_PI) - 0.5));
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
}

TEST_CASE("splitmix64 matches the reference generator") {
  // First output of the reference SplitMix64 seeded with 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("seed mixing separates replications and streams") {
  CHECK(mix_seed(1, 0, Stream::kTraining) == mix_seed(1, 0, Stream::kTraining));
  CHECK(mix_seed(1, 0, Stream::kTraining) != mix_seed(1, 0, Stream::kDeployment));
  CHECK(mix_seed(1, 0, Stream::kTraining) != mix_seed(1, 1, Stream::kTraining));
  CHECK(mix_seed(1, 0, Stream::kTraining) != mix_seed(2, 0, Stream::kTraining));
}

TEST_CASE("rng is deterministic and uniform lies in [0, 1)") {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal draws have unit variance and zero mean") {
  Rng rng(2024);
  RunningStats s, s4;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s.add(z);
    s4.add(z * z);
  }
  CHECK(std::abs(s.mean()) < 5.0 * std::sqrt(1.0 / n));
  // Var(Z^2) = 2 for a standard Normal.
  CHECK(std::abs(s4.mean() - 1.0) < 5.0 * std::sqrt(2.0 / n));
  Rng shifted(5);
  RunningStats t;
  for (int i = 0; i < n; ++i) t.add(shifted.normal(3.0, 2.0));
  CHECK(std::abs(t.mean() - 3.0) < 5.0 * 2.0 / std::sqrt(n));
}
