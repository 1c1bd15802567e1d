#pragma once

#include <string>

#include "tploc/globalalign/fae.hpp"

namespace tploc::globalalign {

/// Halves the channel count by taking the max of adjacent channel pairs: [N, C] -> [N, C/2].
Tensor channel_max_pool(const Tensor& x);

/// Query descriptor: input projection, two blocks of (self-attention, channel
/// max-pool), max over sentences, output projection, L2 normalization.
/// Permutation- and duplication-invariant over sentences.
struct TextGlobalEncoder {
  Linear input;
  SelfAttention first;
  SelfAttention second;
  Linear output;

  /// `hidden_width` must be divisible by 4.
  static TextGlobalEncoder create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                  std::size_t hidden_width, std::size_t output_width, Rng& rng);
  /// [N_q, D] -> [1, output_width].
  Tensor encode(const Tensor& sentences) const;
};

}  // namespace tploc::globalalign
