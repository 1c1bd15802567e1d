#include "tploc/instalign/beose.hpp"

#include "tploc/errors.hpp"

namespace tploc::instalign {

Tensor bezier(const Tensor& p0, const Tensor& p1, const Tensor& p2, const Tensor& tau) {
  Tensor u = add_scalar(neg(tau), 1.0);
  return u * u * p0 + 2.0 * (u * tau) * p1 + tau * tau * p2;
}

BeoseLayer BeoseLayer::create(ParameterStore& store, const std::string& name, std::size_t width, Rng& rng) {
  BeoseLayer l;
  l.cell = LstmCell::create(store, name + ".cell", width, width, rng);
  l.start = Linear::create(store, name + ".start", width, width, rng);
  l.end = Linear::create(store, name + ".end", width, width, rng);
  l.control = Linear::create(store, name + ".control", width, width, rng);
  l.tau_logit = store.add(name + ".tau_logit", Shape{1}, Init::kZeros, rng);
  return l;
}

BeoseLayer::Trace BeoseLayer::trace(const Tensor& edges) const {
  Trace t;
  Tensor h = gated_recurrent_step(edges, Tensor::zeros(Shape{edges.dim(0), cell.hidden_width()}), cell);
  t.p0 = start(h);
  t.p2 = end(h);
  t.p1 = control(t.p0);
  t.tau = sigmoid(tau_logit);
  t.curve = bezier(t.p0, t.p1, t.p2, t.tau);
  t.output = tanh(t.curve);
  return t;
}

Beose Beose::create(ParameterStore& store, const std::string& name, std::size_t width, std::size_t iterations,
                    Rng& rng) {
  if (iterations == 0) throw ConfigError("beose: iteration count must be at least 1");
  Beose b;
  for (std::size_t i = 0; i < iterations; ++i)
    b.layers.push_back(BeoseLayer::create(store, name + ".layer" + std::to_string(i), width, rng));
  return b;
}

EdgeGraph Beose::operator()(const EdgeGraph& graph) const {
  EdgeGraph out = graph;
  for (const auto& layer : layers) out.edges = layer(out.edges);
  return out;
}

}  // namespace tploc::instalign
