#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tploc/diffcore/nn.hpp"
#include "tploc/scene/types.hpp"

namespace tploc::finestage {

inline constexpr double kMinPrecision = 1e-3;

/// Cross-attention from the running text sequence onto submap features, then a
/// recurrent pass over the attended rows.
struct FusionBlock {
  Linear query;
  Linear key;
  Linear value;
  LstmCell cell;

  static FusionBlock create(ParameterStore& store, const std::string& name, std::size_t text_width,
                            std::size_t object_width, std::size_t width, Rng& rng);
};

struct LocalizationPrediction {
  Tensor delta;      // [1, 2] meters
  Tensor precision;  // [1], > 0
  Tensor position;   // [1, 2] = center + delta
};

/// Fusion and regression heads. The offset head's output is scaled by
/// kPositionScale so its raw output stays O(1).
struct FineLocalizer {
  Linear input;
  std::vector<FusionBlock> blocks;
  Mlp offset_head;
  Mlp precision_head;

  static FineLocalizer create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                              std::size_t width, std::size_t num_blocks, Rng& rng);
  std::size_t width() const { return input.out_features(); }

  /// text [N_q, D], objects [N_s, D] -> f_u [1, width]. The recurrent state
  /// carries over from one block to the next; f_u is the mean of the last
  /// block's hidden rows.
  Tensor fuse(const Tensor& text, const Tensor& objects) const;

  /// With `use_precision` false the precision is the constant 1.
  LocalizationPrediction predict(const Tensor& fused, const scene::Vec2& center, bool use_precision = true) const;
};

/// Mean over rows of lambda * (|dx| + |dy|) + 1 / lambda. `position` and `truth`
/// are [B, 2], `precision` has B entries. Throws ContractViolation if any
/// precision is not positive.
Tensor uncertainty_loss(const Tensor& position, const Tensor& precision, const Tensor& truth);

}  // namespace tploc::finestage
