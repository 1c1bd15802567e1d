#include "tploc/instalign/aggregation.hpp"

#include "tploc/errors.hpp"

namespace tploc::instalign {
namespace {

// Start with a narrow latent (sigma ~ 0.14) so early training is not noise-dominated.
constexpr double kInitialLogVar = -4.0;

Tensor as_cube(const EdgeGraph& g, const Tensor& t) { return reshape(t, Shape{g.nodes, g.nodes, t.dim(1)}); }

}  // namespace

std::string_view to_string(AggregationMode m) {
  switch (m) {
    case AggregationMode::kWeighted: return "weighted";
    case AggregationMode::kLiteral: return "literal";
    case AggregationMode::kMaxPool: return "maxpool";
  }
  return "?";
}

AggregationMode parse_aggregation_mode(std::string_view s) {
  if (s == "weighted") return AggregationMode::kWeighted;
  if (s == "literal") return AggregationMode::kLiteral;
  if (s == "maxpool") return AggregationMode::kMaxPool;
  throw ConfigError("unknown aggregation mode '" + std::string(s) + "'");
}

GaussianAggregator GaussianAggregator::create(ParameterStore& store, const std::string& name, std::size_t width,
                                              Rng& rng) {
  GaussianAggregator a;
  a.mean = Linear::create(store, name + ".mean", width, width, rng);
  a.log_var = Linear::create(store, name + ".log_var", width, width, rng);
  store.assign(name + ".log_var.bias", std::vector<double>(width, kInitialLogVar));
  return a;
}

Tensor reparameterize(const Tensor& mu, const Tensor& log_var, const Tensor& eps) {
  return mu + exp(scale(log_var, 0.5)) * eps;
}

Tensor max_pool_edges(const EdgeGraph& graph) { return max_axis(as_cube(graph, graph.edges), 1); }

AggregationOutput GaussianAggregator::operator()(const EdgeGraph& graph, NoiseSource& noise,
                                                 AggregationMode mode) const {
  AggregationOutput out;
  if (mode == AggregationMode::kMaxPool) {
    out.descriptors = max_pool_edges(graph);
    return out;
  }
  out.mean = mean(graph.edges);
  out.log_var = log_var(graph.edges);
  out.latent = reparameterize(out.mean, out.log_var, noise.draw(graph.edges.shape()));
  Tensor z = as_cube(graph, out.latent);
  Tensor e = as_cube(graph, graph.edges);
  Tensor wz = softmax(z, 1);
  Tensor we = softmax(e, 1);
  out.descriptors = mode == AggregationMode::kLiteral ? sum_axis(wz + we, 1) : sum_axis(wz * z + we * e, 1);
  return out;
}

}  // namespace tploc::instalign
