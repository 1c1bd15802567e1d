#include "tploc/diffcore/nn.hpp"

#include <cmath>

#include "tploc/errors.hpp"

namespace tploc {

Tensor ParameterStore::add(const std::string& name, const Shape& shape, Init init, Rng& rng) {
  std::vector<double> v(shape_numel(shape), 0.0);
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kXavier: {
      double fan_in = shape.size() >= 2 ? static_cast<double>(shape[0]) : 1.0;
      double fan_out = shape.size() >= 2 ? static_cast<double>(shape[1])
                                         : static_cast<double>(shape.empty() ? 1 : shape[0]);
      double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (auto& x : v) x = rng.uniform(-limit, limit);
      break;
    }
    case Init::kNormalSmall:
      for (auto& x : v) x = 0.1 * rng.normal();
      break;
  }
  return add(name, Tensor(shape, std::move(v), true));
}

Tensor ParameterStore::add(const std::string& name, Tensor initial) {
  if (params_.count(name)) throw ContractViolation("parameter registered twice: " + name);
  Tensor t(initial.shape(), std::vector<double>(initial.values().begin(), initial.values().end()),
           true);
  Parameter p{t, std::vector<double>(t.numel(), 0.0), std::vector<double>(t.numel(), 0.0)};
  params_.emplace(name, std::move(p));
  return t;
}

Tensor ParameterStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractViolation("unknown parameter: " + name);
  return it->second.value;
}

std::size_t ParameterStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.numel();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& [_, p] : params_) p.value.node()->grad.assign(p.value.numel(), 0.0);
}

void ParameterStore::assign(const std::string& name, const std::vector<double>& values) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractViolation("unknown parameter: " + name);
  auto dst = it->second.value.mutable_values();
  if (dst.size() != values.size()) {
    throw ContractViolation("parameter " + name + ": expected " + std::to_string(dst.size()) +
                            " values, got " + std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), dst.begin());
}

GradientMap backward(const Tensor& loss, ParameterStore& store) {
  store.zero_grad();
  run_backward(loss);
  GradientMap grads;
  for (const auto& [name, p] : store.entries()) {
    const auto& g = p.value.node()->grad;
    grads.emplace(name, g.size() == p.value.numel() ? g : std::vector<double>(p.value.numel()));
  }
  return grads;
}

Linear Linear::create(ParameterStore& store, const std::string& name, std::size_t in,
                      std::size_t out, Rng& rng, bool with_bias) {
  Linear l;
  l.weight = store.add(name + ".weight", Shape{in, out}, Init::kXavier, rng);
  if (with_bias) l.bias = store.add(name + ".bias", Shape{out}, Init::kZeros, rng);
  return l;
}

Mlp Mlp::create(ParameterStore& store, const std::string& name, std::size_t in,
                std::size_t hidden_width, std::size_t out, Rng& rng) {
  return {Linear::create(store, name + ".hidden", in, hidden_width, rng),
          Linear::create(store, name + ".output", hidden_width, out, rng)};
}

namespace {

bool is_constant_zero(const Tensor& t) {
  if (t.requires_grad()) return false;
  for (double v : t.values())
    if (v != 0.0) return false;
  return true;
}

}  // namespace

LstmState LstmState::zeros(std::size_t rows, std::size_t width) {
  return {Tensor::zeros(Shape{rows, width}), Tensor::zeros(Shape{rows, width})};
}

LstmCell LstmCell::create(ParameterStore& store, const std::string& name, std::size_t in,
                          std::size_t hidden, Rng& rng) {
  LstmCell c;
  c.input_weight = store.add(name + ".input_weight", Shape{in, 4 * hidden}, Init::kXavier, rng);
  c.hidden_weight =
      store.add(name + ".hidden_weight", Shape{hidden, 4 * hidden}, Init::kXavier, rng);
  c.bias = store.add(name + ".bias", Shape{4 * hidden}, Init::kZeros, rng);
  return c;
}

LstmState LstmCell::step(const Tensor& x, const LstmState& state) const {
  std::size_t h = hidden_width();
  if (x.rank() != 2 || x.dim(1) != input_width()) {
    throw ContractViolation("lstm: input " + shape_str(x.shape()) + " does not match width " +
                            std::to_string(input_width()));
  }
  if (state.hidden.rank() != 2 || state.hidden.dim(1) != h || state.hidden.dim(0) != x.dim(0) ||
      state.cell.shape() != state.hidden.shape()) {
    throw ContractViolation("lstm: state " + shape_str(state.hidden.shape()) +
                            " does not match hidden width " + std::to_string(h));
  }
  // Constant zero state terms contribute nothing; skipping them saves the
  // hidden matmul on every from-scratch step.
  Tensor z = linear(x, input_weight, bias);
  if (!is_constant_zero(state.hidden)) z = add(z, linear(state.hidden, hidden_weight, Tensor()));
  Tensor i = sigmoid(slice(z, 1, 0, h));
  Tensor g = tanh(slice(z, 1, 2 * h, h));
  Tensor o = sigmoid(slice(z, 1, 3 * h, h));
  Tensor c = mul(i, g);
  if (!is_constant_zero(state.cell)) c = add(mul(sigmoid(slice(z, 1, h, h)), state.cell), c);
  return {mul(o, tanh(c)), c};
}

Tensor gated_recurrent_step(const Tensor& x, const Tensor& h, const LstmCell& cell) {
  Tensor c = Tensor::zeros(h.shape());
  return cell.step(x, {h, c}).hidden;
}

}  // namespace tploc
