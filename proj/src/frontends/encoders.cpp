#include "tploc/frontends/encoders.hpp"

#include "tploc/errors.hpp"

namespace tploc::frontends {

TextEncoder TextEncoder::create(ParameterStore& store, const std::string& name, std::size_t vocab_size,
                                std::size_t width, Rng& rng) {
  TextEncoder e;
  e.token_embedding = store.add(name + ".token_embedding", Shape{vocab_size, width}, Init::kXavier, rng);
  e.projection = Linear::create(store, name + ".projection", width, width, rng);
  return e;
}

Tensor TextEncoder::encode_tokens(const std::vector<std::vector<std::size_t>>& sentences) const {
  if (sentences.empty()) throw EmptyInputError("encode_text: query has no sentences");
  std::vector<std::size_t> flat;
  for (const auto& s : sentences) {
    if (s.empty()) throw EmptyInputError("encode_text: empty sentence");
    flat.insert(flat.end(), s.begin(), s.end());
  }
  // Row j of `averaging` holds 1/len_j over sentence j's token slots.
  std::vector<double> avg(sentences.size() * flat.size(), 0.0);
  std::size_t col = 0;
  for (std::size_t j = 0; j < sentences.size(); ++j) {
    double w = 1.0 / static_cast<double>(sentences[j].size());
    for (std::size_t k = 0; k < sentences[j].size(); ++k) avg[j * flat.size() + col++] = w;
  }
  Tensor averaging(Shape{sentences.size(), flat.size()}, std::move(avg));
  Tensor pooled = matmul(averaging, gather_rows(token_embedding, flat));
  return tanh(projection(pooled));
}

TextFeatureSet TextEncoder::encode(const scene::Query& query, const Vocabulary& vocab) const {
  std::vector<std::vector<std::size_t>> sentences;
  for (const auto& d : query.descriptions) sentences.push_back(vocab.encode(d));
  return {encode_tokens(sentences), query.id};
}

ObjectEncoder ObjectEncoder::create(ParameterStore& store, const std::string& name, std::size_t width,
                                    Rng& rng) {
  ObjectEncoder e;
  e.class_embedding = store.add(name + ".class_embedding", Shape{scene::kNumClasses, width}, Init::kXavier, rng);
  e.color_embedding = store.add(name + ".color_embedding", Shape{scene::kNumColors, width}, Init::kXavier, rng);
  e.offset = Linear::create(store, name + ".offset", 3, width, rng);
  return e;
}

ObjectFeatureSet ObjectEncoder::encode(const scene::SceneSubmap& submap) const {
  std::size_t n = submap.instances.size();
  if (n < 2) {
    throw TooFewInstancesError("submap " + std::to_string(submap.id) + " has " + std::to_string(n) +
                               " instances; the pairwise graph needs at least 2");
  }
  std::vector<std::size_t> cls, col;
  std::vector<double> off;
  ObjectFeatureSet out;
  out.submap_id = submap.id;
  out.center = submap.center;
  for (const auto& inst : submap.instances) {
    cls.push_back(static_cast<std::size_t>(inst.object_class));
    col.push_back(static_cast<std::size_t>(inst.color));
    off.push_back((inst.centroid.x - submap.center.x) / kPositionScale);
    off.push_back((inst.centroid.y - submap.center.y) / kPositionScale);
    off.push_back(inst.centroid.z / kPositionScale);
    out.centroids.push_back(inst.centroid);
  }
  Tensor offsets(Shape{n, 3}, std::move(off));
  out.features = tanh(gather_rows(class_embedding, cls) + gather_rows(color_embedding, col) + offset(offsets));
  return out;
}

}  // namespace tploc::frontends
