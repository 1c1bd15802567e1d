#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tploc/diffcore/nn.hpp"
#include "tploc/scene/types.hpp"

namespace tploc::instalign {

enum class Modality { kPoint, kText };

/// Directed pairwise edges stored row-major: row m * nodes + n holds edge (m, n).
struct EdgeGraph {
  Tensor edges;  // [nodes * nodes, width]
  std::size_t nodes = 0;
  Modality modality = Modality::kPoint;

  std::size_t width() const { return edges.dim(1); }
  /// Edge (m, n) as a [width] vector of values.
  std::vector<double> edge(std::size_t m, std::size_t n) const;
};

/// O[m][n] = centroid(m) - centroid(n), shape [N, N, 3]. Throws
/// TooFewInstancesError when N < 2.
Tensor build_offset_tensor(const std::vector<scene::Vec3>& centroids);
Tensor build_offset_tensor(const scene::SceneSubmap& submap);

/// Point edges: E[m][n] = fuse([v_m ; v_n ; geometry(O[m][n] / kPositionScale)]).
/// Text edges:  E[m][n] = fuse_text([t_m ; t_n]); a single sentence gives one self-edge.
struct EdgeFusion {
  Mlp geometry;
  Mlp point_fuse;
  Mlp text_fuse;

  static EdgeFusion create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                           std::size_t edge_width, Rng& rng);

  EdgeGraph fuse_points(const Tensor& features, const Tensor& offsets) const;
  EdgeGraph fuse_text(const Tensor& features) const;
};

}  // namespace tploc::instalign
