#include "tploc/harness/training.hpp"

#include <algorithm>
#include <list>
#include <numeric>
#include <unordered_set>

#include "tploc/diffcore/optim.hpp"
#include "tploc/errors.hpp"

namespace tploc::harness {

namespace {

constexpr std::uint64_t kShuffleSalt = 0x21;
constexpr std::uint64_t kNoiseSalt = 0x22;
constexpr std::uint64_t kSubsetSalt = 0x23;
constexpr std::uint64_t kFineShuffleSalt = 0x24;

void shuffle(std::vector<std::size_t>& order, Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
}

std::string where(const char* stage, int epoch, std::size_t batch) {
  return std::string(stage) + " training diverged at epoch " + std::to_string(epoch) + ", batch " +
         std::to_string(batch) + ": ";
}

}  // namespace

std::vector<std::vector<Sample>> make_batches(const std::vector<Sample>& samples, std::size_t batch_size,
                                              Rng& rng) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  std::list<std::size_t> pending(order.begin(), order.end());
  std::vector<std::vector<Sample>> batches;
  while (!pending.empty()) {
    std::vector<Sample> batch;
    std::unordered_set<int> used;
    for (auto it = pending.begin(); it != pending.end() && batch.size() < batch_size;) {
      const Sample& s = samples[*it];
      if (used.insert(s.submap->id).second) {
        batch.push_back(s);
        it = pending.erase(it);
      } else {
        ++it;
      }
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<Sample> training_subset(const std::vector<Sample>& samples, const RunConfig& config) {
  if (config.train_queries <= 0 || static_cast<std::size_t>(config.train_queries) >= samples.size()) {
    return samples;
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, kSubsetSalt));
  shuffle(order, rng);
  order.resize(static_cast<std::size_t>(config.train_queries));
  std::sort(order.begin(), order.end());
  std::vector<Sample> out;
  for (auto i : order) out.push_back(samples[i]);
  return out;
}

std::vector<EpochLoss> train_coarse(CoarseModel& model, const scene::Corpus& corpus, const EpochCallback& on_epoch) {
  const RunConfig& cfg = model.config;
  auto samples = training_subset(corpus_samples(corpus), cfg);
  if (samples.empty()) throw DataError("train_coarse: corpus has no queries");
  Rng shuffle_rng(derive_seed(cfg.seed, kShuffleSalt));
  NoiseSource noise = NoiseSource::seeded(derive_seed(cfg.seed, kNoiseSalt));
  AdamOptions adam;
  adam.learning_rate = cfg.coarse_learning_rate;
  std::vector<EpochLoss> curve;
  for (int epoch = 1; epoch <= cfg.coarse_epochs; ++epoch) {
    auto batches = make_batches(samples, static_cast<std::size_t>(cfg.coarse_batch), shuffle_rng);
    EpochLoss acc;
    acc.epoch = epoch;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      try {
        auto terms = model.loss(batches[b], noise);
        auto grads = backward(terms.total, model.store);
        adam_step(model.store, grads, adam);
        acc.total += terms.total.item();
        acc.global += terms.global.item();
        acc.spatial += terms.spatial.item();
        acc.object += terms.object.item();
      } catch (const NumericError& e) {
        throw NumericError(where("coarse", epoch, b) + e.what());
      }
    }
    double n = static_cast<double>(batches.size());
    acc.total /= n;
    acc.global /= n;
    acc.spatial /= n;
    acc.object /= n;
    curve.push_back(acc);
    if (on_epoch) on_epoch(acc);
  }
  return curve;
}

std::vector<EpochLoss> train_fine(FineModel& model, const scene::Corpus& corpus, const EpochCallback& on_epoch) {
  const RunConfig& cfg = model.config;
  auto samples = training_subset(corpus_samples(corpus), cfg);
  if (samples.empty()) throw DataError("train_fine: corpus has no queries");
  Rng shuffle_rng(derive_seed(cfg.seed, kFineShuffleSalt));
  AdamOptions adam;
  adam.learning_rate = cfg.fine_learning_rate;
  std::vector<EpochLoss> curve;
  for (int epoch = 1; epoch <= cfg.fine_epochs; ++epoch) {
    auto batches = make_batches(samples, static_cast<std::size_t>(cfg.fine_batch), shuffle_rng);
    EpochLoss acc;
    acc.epoch = epoch;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      try {
        Tensor loss = model.loss(batches[b]);
        auto grads = backward(loss, model.store);
        adam_step(model.store, grads, adam);
        acc.total += loss.item();
      } catch (const NumericError& e) {
        throw NumericError(where("fine", epoch, b) + e.what());
      }
    }
    acc.total /= static_cast<double>(batches.size());
    curve.push_back(acc);
    if (on_epoch) on_epoch(acc);
  }
  return curve;
}

}  // namespace tploc::harness
