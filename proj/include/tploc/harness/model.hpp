#pragma once

// Trainable models for both stages, assembled from a RunConfig.

#include <optional>
#include <vector>

#include "tploc/diffcore/noise.hpp"
#include "tploc/finestage/localizer.hpp"
#include "tploc/frontends/encoders.hpp"
#include "tploc/frontends/vocabulary.hpp"
#include "tploc/globalalign/fae.hpp"
#include "tploc/globalalign/losses.hpp"
#include "tploc/globalalign/text_global.hpp"
#include "tploc/harness/config.hpp"
#include "tploc/instalign/aggregation.hpp"
#include "tploc/instalign/beose.hpp"
#include "tploc/instalign/edges.hpp"
#include "tploc/instalign/instance_loss.hpp"
#include "tploc/scene/generator.hpp"

namespace tploc::harness {

/// One (query, ground-truth submap) training pair.
struct Sample {
  const scene::Query* query = nullptr;
  const scene::SceneSubmap* submap = nullptr;
};

/// Resolves every query's ground-truth submap. Throws DataError for a dangling id.
std::vector<Sample> corpus_samples(const scene::Corpus& corpus);

/// Coarse stage: frontends, instance-level alignment and global encoders.
/// Parameters are registered only for the modules the config enables, so a
/// checkpoint's parameter names identify its architecture.
struct CoarseModel {
  RunConfig config;
  frontends::Vocabulary vocab;
  ParameterStore store;

  frontends::TextEncoder text;
  frontends::ObjectEncoder objects;
  instalign::EdgeFusion edges;
  std::optional<instalign::Beose> beose;
  std::optional<instalign::GaussianAggregator> aggregator;
  instalign::RawProjection raw;
  std::optional<globalalign::FrequencyEncoder> fae;
  std::optional<globalalign::RecurrentEncoder> recurrent;
  globalalign::TextGlobalEncoder text_global;

  /// Validates the config; initial weights come from a stream derived from config.seed.
  static CoarseModel create(const RunConfig& config);

  /// Node descriptors of the instance graph, [N, edge_width].
  Tensor point_instances(const frontends::ObjectFeatureSet& objects, NoiseSource& noise) const;
  Tensor text_instances(const frontends::TextFeatureSet& text, NoiseSource& noise) const;
  /// [1, global_width], unit norm.
  Tensor point_global(const frontends::ObjectFeatureSet& objects) const;
  Tensor text_global_descriptor(const frontends::TextFeatureSet& text) const;

  /// Coarse loss over a batch of pairs. Only enabled terms are computed.
  globalalign::CoarseLossTerms loss(const std::vector<Sample>& batch, NoiseSource& noise) const;

  std::vector<double> encode_submap(const scene::SceneSubmap& submap) const;
  std::vector<double> encode_query(const scene::Query& query) const;
};

struct FinePrediction {
  scene::Vec2 position;
  double precision = 1.0;
};

/// Fine stage: its own frontends (optionally copied from a coarse model) and the localizer.
struct FineModel {
  RunConfig config;
  frontends::Vocabulary vocab;
  ParameterStore store;

  frontends::TextEncoder text;
  frontends::ObjectEncoder objects;
  finestage::FineLocalizer localizer;

  /// With `coarse` given, the text and object encoders start from its weights.
  static FineModel create(const RunConfig& config, const CoarseModel* coarse = nullptr);

  finestage::LocalizationPrediction forward(const scene::Query& query, const scene::SceneSubmap& submap) const;
  /// Mean uncertainty loss over the batch (pure L1 + 1 with the precision head off).
  Tensor loss(const std::vector<Sample>& batch) const;
  FinePrediction predict(const scene::Query& query, const scene::SceneSubmap& submap) const;
};

}  // namespace tploc::harness
