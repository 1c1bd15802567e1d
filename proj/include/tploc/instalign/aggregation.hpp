#pragma once

#include <string>

#include "tploc/diffcore/noise.hpp"
#include "tploc/diffcore/nn.hpp"
#include "tploc/instalign/edges.hpp"

namespace tploc::instalign {

/// How per-edge features collapse to per-node descriptors.
///   kWeighted: v_m = sum_n softmax_n(Z)[m,n] * Z[m,n] + softmax_n(E)[m,n] * E[m,n]
///   kLiteral:  v_m = sum_n softmax_n(Z)[m,n] + softmax_n(E)[m,n]   (identically 2)
///   kMaxPool:  v_m = max_n E[m,n]   (no latent; the "w/o GA" replacement)
/// Softmaxes run per channel across n.
enum class AggregationMode { kWeighted, kLiteral, kMaxPool };

std::string_view to_string(AggregationMode m);
AggregationMode parse_aggregation_mode(std::string_view s);

struct AggregationOutput {
  Tensor descriptors;  // [N, width]
  Tensor mean;         // [N*N, width], undefined for kMaxPool
  Tensor log_var;
  Tensor latent;       // Z = mean + exp(log_var / 2) * noise
};

/// Reparameterized Gaussian latent per edge followed by softmax pooling over n.
struct GaussianAggregator {
  Linear mean;
  Linear log_var;

  static GaussianAggregator create(ParameterStore& store, const std::string& name, std::size_t width, Rng& rng);

  AggregationOutput operator()(const EdgeGraph& graph, NoiseSource& noise,
                               AggregationMode mode = AggregationMode::kWeighted) const;
};

/// Z = mu + exp(0.5 * log_var) * eps.
Tensor reparameterize(const Tensor& mu, const Tensor& log_var, const Tensor& eps);

/// Per-channel max over n of an edge graph: [N, width].
Tensor max_pool_edges(const EdgeGraph& graph);

}  // namespace tploc::instalign
