#pragma once

#include <cstdint>
#include <random>

namespace tploc {

/// Seeded generator. Uses the standard mt19937_64 engine (whose output sequence
/// is fixed by the standard) with local conversions to uniform and normal so that
/// draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; derives independent stream seeds from (seed, salt).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace tploc
