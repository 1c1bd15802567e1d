#pragma once

#include <cstdint>
#include <vector>

#include "tploc/diffcore/rng.hpp"
#include "tploc/diffcore/tensor.hpp"

namespace tploc {

/// Source of standard-normal noise for reparameterized sampling.
///
/// kSeeded draws fresh values and records them; freeze() switches to replaying
/// the recorded draws in order (rewind() restarts the replay), which makes any
/// function that consumes noise deterministic for gradient checks. kZero always
/// yields zeros.
class NoiseSource {
 public:
  enum class Mode { kSeeded, kZero, kReplay };

  static NoiseSource seeded(std::uint64_t seed) { return NoiseSource(Mode::kSeeded, seed); }
  static NoiseSource zero() { return NoiseSource(Mode::kZero, 0); }

  Tensor draw(const Shape& shape);

  void freeze();
  void rewind() { cursor_ = 0; }
  /// Drops the recording (only meaningful in seeded mode).
  void clear_recording() { tape_.clear(); cursor_ = 0; }
  void set_recording(bool on) { recording_ = on; }
  Mode mode() const { return mode_; }

 private:
  NoiseSource(Mode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {}

  Mode mode_;
  Rng rng_;
  bool recording_ = false;
  std::vector<std::vector<double>> tape_;
  std::size_t cursor_ = 0;
};

}  // namespace tploc
