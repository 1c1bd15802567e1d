#pragma once

#include <functional>
#include <vector>

#include "tploc/harness/model.hpp"

namespace tploc::harness {

/// Mean per-batch loss terms of one epoch. The fine stage fills only `total`.
struct EpochLoss {
  int epoch = 0;
  double total = 0.0;
  double global = 0.0;
  double spatial = 0.0;
  double object = 0.0;
  friend bool operator==(const EpochLoss&, const EpochLoss&) = default;
};

using EpochCallback = std::function<void(const EpochLoss&)>;

/// Splits a shuffled sample order into batches of at most `batch_size` with no
/// submap repeated inside a batch (a repeat would be a false negative for the
/// contrastive losses). Samples that collide are deferred to a later batch.
std::vector<std::vector<Sample>> make_batches(const std::vector<Sample>& samples, std::size_t batch_size,
                                              Rng& rng);

/// The samples trained on: all of them, or a seeded subset of config.train_queries.
std::vector<Sample> training_subset(const std::vector<Sample>& samples, const RunConfig& config);

/// Adam over L_Coarse. A NaN/Inf anywhere aborts with a NumericError naming the epoch and batch.
std::vector<EpochLoss> train_coarse(CoarseModel& model, const scene::Corpus& corpus,
                                    const EpochCallback& on_epoch = {});

/// Adam over the uncertainty loss on (query, ground-truth submap) pairs.
std::vector<EpochLoss> train_fine(FineModel& model, const scene::Corpus& corpus,
                                  const EpochCallback& on_epoch = {});

}  // namespace tploc::harness
