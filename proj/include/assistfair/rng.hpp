#pragma once

#include <cstdint>
#include <random>

namespace assistfair {

/// Sub-stream identifiers mixed into per-replication seeds.
enum class Stream : std::uint64_t {
  kTraining = 1,
  kDeployment = 2,
};

/// SplitMix64 finalizer; a bijective avalanche hash on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for (master, replication, stream). Depends only on the triple, so
/// replications can run in any order or on any thread.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t replication,
                                 Stream stream) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ replication);
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

/// mt19937_64 (output sequence fixed by the standard) with hand-rolled
/// uniform and Normal transforms, so draws are identical across standard
/// libraries. Normals use the Marsaglia polar method.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace assistfair
