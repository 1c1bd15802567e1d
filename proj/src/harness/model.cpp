#include "tploc/harness/model.hpp"

#include <unordered_map>

#include "tploc/errors.hpp"

namespace tploc::harness {

namespace {

constexpr std::uint64_t kCoarseInitSalt = 0x11;
constexpr std::uint64_t kFineInitSalt = 0x12;

std::vector<double> to_vector(const Tensor& t) {
  auto v = t.values();
  return {v.begin(), v.end()};
}

}  // namespace

std::vector<Sample> corpus_samples(const scene::Corpus& corpus) {
  std::unordered_map<int, const scene::SceneSubmap*> by_id;
  for (const auto& s : corpus.submaps) by_id[s.id] = &s;
  std::vector<Sample> out;
  out.reserve(corpus.queries.size());
  for (const auto& q : corpus.queries) {
    auto it = by_id.find(q.gt_submap_id);
    if (it == by_id.end()) {
      throw DataError("query " + std::to_string(q.id) + " references missing submap " +
                      std::to_string(q.gt_submap_id));
    }
    out.push_back({&q, it->second});
  }
  return out;
}

CoarseModel CoarseModel::create(const RunConfig& config) {
  config.validate();
  CoarseModel m;
  m.config = config;
  m.vocab = frontends::Vocabulary::template_vocabulary();
  Rng rng(derive_seed(config.seed, kCoarseInitSalt));
  auto& st = m.store;
  std::size_t d = config.feature_width, w = config.edge_width;
  m.text = frontends::TextEncoder::create(st, "text", m.vocab.size(), d, rng);
  m.objects = frontends::ObjectEncoder::create(st, "objects", d, rng);
  m.edges = instalign::EdgeFusion::create(st, "edges", d, w, rng);
  if (config.beose) m.beose = instalign::Beose::create(st, "beose", w, config.beose_iterations, rng);
  if (config.gaussian_aggregation) m.aggregator = instalign::GaussianAggregator::create(st, "aggregator", w, rng);
  m.raw = instalign::RawProjection::create(st, "raw", d, w, rng);
  if (config.fae) {
    m.fae = globalalign::FrequencyEncoder::create(st, "fae", d, d, config.global_width, rng);
  } else {
    m.recurrent = globalalign::RecurrentEncoder::create(st, "recurrent", d, d, config.global_width, rng);
  }
  m.text_global = globalalign::TextGlobalEncoder::create(st, "text_global", d, d, config.global_width, rng);
  return m;
}

Tensor CoarseModel::point_instances(const frontends::ObjectFeatureSet& set, NoiseSource& noise) const {
  Tensor offsets = instalign::build_offset_tensor(set.centroids);
  instalign::EdgeGraph graph = edges.fuse_points(set.features, offsets);
  if (beose) graph = (*beose)(graph);
  if (aggregator) return (*aggregator)(graph, noise).descriptors;
  return instalign::max_pool_edges(graph);
}

Tensor CoarseModel::text_instances(const frontends::TextFeatureSet& set, NoiseSource& noise) const {
  instalign::EdgeGraph graph = edges.fuse_text(set.features);
  if (aggregator) return (*aggregator)(graph, noise).descriptors;
  return instalign::max_pool_edges(graph);
}

Tensor CoarseModel::point_global(const frontends::ObjectFeatureSet& set) const {
  Tensor seq = globalalign::ordered_sequence(set.features, globalalign::canonical_order(set), config.sequence_length);
  return fae ? fae->encode(seq) : recurrent->encode(seq);
}

Tensor CoarseModel::text_global_descriptor(const frontends::TextFeatureSet& set) const {
  return text_global.encode(set.features);
}

globalalign::CoarseLossTerms CoarseModel::loss(const std::vector<Sample>& batch, NoiseSource& noise) const {
  if (batch.empty()) throw EmptyInputError("coarse loss: empty batch");
  const auto& toggles = config.losses;
  std::vector<Tensor> point_nodes, text_nodes, raw_points, raw_text, point_glo, text_glo;
  for (const auto& s : batch) {
    auto obj = objects.encode(*s.submap);
    auto txt = text.encode(*s.query, vocab);
    if (toggles.spatial) {
      point_nodes.push_back(point_instances(obj, noise));
      text_nodes.push_back(text_instances(txt, noise));
    }
    if (toggles.object) {
      raw_points.push_back(obj.features);
      raw_text.push_back(txt.features);
    }
    if (toggles.global) {
      point_glo.push_back(point_global(obj));
      text_glo.push_back(text_global_descriptor(txt));
    }
  }
  Tensor global, spatial, object;
  if (toggles.global) {
    global = globalalign::global_loss(concat(point_glo, 0), concat(text_glo, 0), config.gamma).total;
  }
  if (toggles.spatial) {
    spatial = instalign::alignment_loss(point_nodes, text_nodes, config.gamma, config.align_mode);
  }
  if (toggles.object) {
    std::vector<Tensor> p, t;
    for (std::size_t b = 0; b < raw_points.size(); ++b) {
      p.push_back(raw.point(raw_points[b]));
      t.push_back(raw.text(raw_text[b]));
    }
    object = instalign::alignment_loss(p, t, config.gamma, config.align_mode);
  }
  return globalalign::coarse_loss(global, spatial, object, toggles);
}

std::vector<double> CoarseModel::encode_submap(const scene::SceneSubmap& submap) const {
  return to_vector(point_global(objects.encode(submap)));
}

std::vector<double> CoarseModel::encode_query(const scene::Query& query) const {
  return to_vector(text_global_descriptor(text.encode(query, vocab)));
}

FineModel FineModel::create(const RunConfig& config, const CoarseModel* coarse) {
  config.validate();
  FineModel m;
  m.config = config;
  m.vocab = frontends::Vocabulary::template_vocabulary();
  Rng rng(derive_seed(config.seed, kFineInitSalt));
  auto& st = m.store;
  std::size_t d = config.feature_width;
  m.text = frontends::TextEncoder::create(st, "text", m.vocab.size(), d, rng);
  m.objects = frontends::ObjectEncoder::create(st, "objects", d, rng);
  m.localizer = finestage::FineLocalizer::create(st, "localizer", d, config.fine_width, config.fine_blocks, rng);
  if (coarse) {
    if (coarse->config.feature_width != d || coarse->vocab.tokens() != m.vocab.tokens()) {
      throw ConfigError("fine model: coarse checkpoint has incompatible frontends");
    }
    for (const auto& [name, p] : coarse->store.entries()) {
      if (name.rfind("text.", 0) == 0 || name.rfind("objects.", 0) == 0) {
        auto v = p.value.values();
        st.assign(name, {v.begin(), v.end()});
      }
    }
  }
  return m;
}

finestage::LocalizationPrediction FineModel::forward(const scene::Query& query,
                                                     const scene::SceneSubmap& submap) const {
  auto txt = text.encode(query, vocab);
  auto obj = objects.encode(submap);
  return localizer.predict(localizer.fuse(txt.features, obj.features), submap.center, config.precision_head);
}

Tensor FineModel::loss(const std::vector<Sample>& batch) const {
  if (batch.empty()) throw EmptyInputError("fine loss: empty batch");
  std::vector<Tensor> positions, precisions;
  std::vector<double> truth;
  for (const auto& s : batch) {
    auto p = forward(*s.query, *s.submap);
    positions.push_back(p.position);
    precisions.push_back(p.precision);
    truth.push_back(s.query->gt_position.x);
    truth.push_back(s.query->gt_position.y);
  }
  Tensor truth_t(Shape{batch.size(), 2}, std::move(truth));
  return finestage::uncertainty_loss(concat(positions, 0), concat(precisions, 0), truth_t);
}

FinePrediction FineModel::predict(const scene::Query& query, const scene::SceneSubmap& submap) const {
  auto p = forward(query, submap);
  return {{p.position.at(0, 0), p.position.at(0, 1)}, p.precision.values()[0]};
}

}  // namespace tploc::harness
