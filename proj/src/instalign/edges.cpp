#include "tploc/instalign/edges.hpp"

#include "tploc/errors.hpp"
#include "tploc/frontends/encoders.hpp"

namespace tploc::instalign {
namespace {

// Row indices selecting v_m and v_n for every edge (m, n).
void pair_indices(std::size_t n, std::vector<std::size_t>& first, std::vector<std::size_t>& second) {
  first.clear();
  second.clear();
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k) {
      first.push_back(m);
      second.push_back(k);
    }
}

void require_nodes(const Tensor& features, std::size_t min_rows, const char* what) {
  if (features.rank() != 2 || features.dim(0) < min_rows) {
    throw ContractViolation(std::string(what) + ": need a [N>=" + std::to_string(min_rows) +
                            ", D] feature matrix, got " +
                            shape_str(features.shape()));
  }
}

}  // namespace

std::vector<double> EdgeGraph::edge(std::size_t m, std::size_t n) const {
  std::size_t w = width();
  auto v = edges.values().subspan((m * nodes + n) * w, w);
  return {v.begin(), v.end()};
}

Tensor build_offset_tensor(const std::vector<scene::Vec3>& centroids) {
  std::size_t n = centroids.size();
  if (n < 2) throw TooFewInstancesError("offset tensor needs at least 2 instances");
  std::vector<double> o;
  o.reserve(n * n * 3);
  for (const auto& a : centroids)
    for (const auto& b : centroids) {
      o.push_back(a.x - b.x);
      o.push_back(a.y - b.y);
      o.push_back(a.z - b.z);
    }
  return Tensor(Shape{n, n, 3}, std::move(o));
}

Tensor build_offset_tensor(const scene::SceneSubmap& submap) {
  std::vector<scene::Vec3> c;
  for (const auto& inst : submap.instances) c.push_back(inst.centroid);
  return build_offset_tensor(c);
}

EdgeFusion EdgeFusion::create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                              std::size_t edge_width, Rng& rng) {
  EdgeFusion f;
  f.geometry = Mlp::create(store, name + ".geometry", 3, edge_width, edge_width, rng);
  f.point_fuse = Mlp::create(store, name + ".point_fuse", 2 * feature_width + edge_width, edge_width, edge_width, rng);
  f.text_fuse = Mlp::create(store, name + ".text_fuse", 2 * feature_width, edge_width, edge_width, rng);
  return f;
}

EdgeGraph EdgeFusion::fuse_points(const Tensor& features, const Tensor& offsets) const {
  require_nodes(features, 2, "fuse_points");
  std::size_t n = features.dim(0);
  if (offsets.shape() != Shape{n, n, 3}) {
    throw ContractViolation("fuse_points: offsets " + shape_str(offsets.shape()) + " do not match " +
                            std::to_string(n) + " nodes");
  }
  std::vector<std::size_t> a, b;
  pair_indices(n, a, b);
  Tensor geo = geometry(scale(reshape(offsets, Shape{n * n, 3}), 1.0 / frontends::kPositionScale));
  Tensor joined = concat({gather_rows(features, a), gather_rows(features, b), geo}, 1);
  return {point_fuse(joined), n, Modality::kPoint};
}

EdgeGraph EdgeFusion::fuse_text(const Tensor& features) const {
  require_nodes(features, 1, "fuse_text");
  std::size_t n = features.dim(0);
  std::vector<std::size_t> a, b;
  pair_indices(n, a, b);
  return {text_fuse(concat({gather_rows(features, a), gather_rows(features, b)}, 1)), n, Modality::kText};
}

}  // namespace tploc::instalign
