#include "tploc/harness/gradcheck_batch.hpp"

#include "tploc/errors.hpp"

namespace tploc::harness {

scene::Corpus micro_corpus(std::uint64_t seed, int batch, int instances, int sentences) {
  if (batch < 1 || instances < 2 || sentences < 1 || sentences > instances) {
    throw ConfigError("micro corpus: need batch >= 1, instances >= 2, 1 <= sentences <= instances");
  }
  scene::GenerationConfig gc;
  gc.num_submaps = batch;
  gc.num_queries = batch;
  gc.min_instances = gc.max_instances = instances;
  gc.min_descriptions = gc.max_descriptions = sentences;
  scene::Corpus corpus = scene::generate_city(seed, scene::Split::kTrain, gc);
  // One query per submap, posed off-center so the fine target is not trivial.
  corpus.queries.clear();
  for (std::size_t i = 0; i < corpus.submaps.size(); ++i) {
    const auto& s = corpus.submaps[i];
    scene::Query q;
    q.id = static_cast<int>(i);
    q.gt_submap_id = s.id;
    q.gt_position = {s.center.x + 2.5 - static_cast<double>(i), s.center.y - 1.5 + 0.5 * static_cast<double>(i)};
    std::vector<scene::ObjectInstance> chosen(s.instances.begin(), s.instances.begin() + sentences);
    q.descriptions = scene::describe_pose(q.gt_position, chosen);
    corpus.queries.push_back(std::move(q));
  }
  return corpus;
}

RunConfig micro_config(std::uint64_t seed, std::size_t width) {
  RunConfig c;
  c.seed = seed;
  c.feature_width = width;
  c.edge_width = width;
  c.global_width = width;
  c.fine_width = width;
  return c;
}

namespace {

// Zero-initialized biases put ReLU inputs of zero-offset self-edges exactly on
// the kink, where central differences see half the slope. A small jitter moves
// every parameter to a generic point.
void jitter(ParameterStore& store, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& [name, p] : store.entries()) {
    for (double& v : p.value.mutable_values()) v += 0.05 * rng.normal();
  }
}

}  // namespace

StageGradChecks check_stage_gradients(std::uint64_t seed, const GradCheckOptions& options, int batch, int instances,
                                      int sentences, std::size_t width) {
  scene::Corpus corpus = micro_corpus(seed, batch, instances, sentences);
  auto samples = corpus_samples(corpus);
  RunConfig cfg = micro_config(seed, width);

  StageGradChecks out;
  CoarseModel coarse = CoarseModel::create(cfg);
  jitter(coarse.store, derive_seed(seed, 0x32));
  NoiseSource noise = NoiseSource::seeded(derive_seed(seed, 0x31));
  noise.set_recording(true);
  coarse.loss(samples, noise);
  noise.freeze();
  out.coarse = grad_check(
      [&] {
        noise.rewind();
        return coarse.loss(samples, noise).total;
      },
      coarse.store, options);

  FineModel fine = FineModel::create(cfg, &coarse);
  jitter(fine.store, derive_seed(seed, 0x33));
  out.fine = grad_check([&] { return fine.loss(samples); }, fine.store, options);
  return out;
}

}  // namespace tploc::harness
