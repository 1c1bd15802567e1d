#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tploc/diffcore/nn.hpp"
#include "tploc/frontends/vocabulary.hpp"
#include "tploc/scene/types.hpp"

namespace tploc::frontends {

/// One row per description sentence, in sentence order.
struct TextFeatureSet {
  Tensor features;  // [N_q, D]
  int query_id = 0;
};

/// One row per instance, in the submap's instance order.
struct ObjectFeatureSet {
  Tensor features;  // [N_s, D]
  int submap_id = 0;
  std::vector<scene::Vec3> centroids;
  scene::Vec2 center;
};

/// Offsets are divided by this before any layer sees them, keeping inputs O(1).
inline constexpr double kPositionScale = 10.0;

/// t_j = tanh(W * mean(token embeddings of sentence j) + b).
struct TextEncoder {
  Tensor token_embedding;  // [vocab, D]
  Linear projection;

  static TextEncoder create(ParameterStore& store, const std::string& name, std::size_t vocab_size,
                            std::size_t width, Rng& rng);
  std::size_t width() const { return projection.out_features(); }

  /// Sentences given as token indices (see Vocabulary::encode).
  Tensor encode_tokens(const std::vector<std::vector<std::size_t>>& sentences) const;
  /// Throws VocabError on unknown tokens.
  TextFeatureSet encode(const scene::Query& query, const Vocabulary& vocab) const;
};

/// v_k = tanh(class_emb + color_emb + W * (centroid - center) / kPositionScale + b).
struct ObjectEncoder {
  Tensor class_embedding;  // [8, D]
  Tensor color_embedding;  // [7, D]
  Linear offset;           // 3 -> D

  static ObjectEncoder create(ParameterStore& store, const std::string& name, std::size_t width,
                              Rng& rng);
  std::size_t width() const { return offset.out_features(); }

  /// Throws TooFewInstancesError when the submap has fewer than two instances.
  ObjectFeatureSet encode(const scene::SceneSubmap& submap) const;
};

}  // namespace tploc::frontends
