#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tploc/diffcore/ops.hpp"
#include "tploc/diffcore/rng.hpp"
#include "tploc/diffcore/tensor.hpp"

namespace tploc {

enum class Init { kZeros, kXavier, kNormalSmall };

/// A trainable tensor plus its Adam moments.
struct Parameter {
  Tensor value;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
};

using GradientMap = std::map<std::string, std::vector<double>>;

/// Named trainable tensors. Names are unique; iteration order is lexicographic,
/// which fixes the order of every reduction over parameters.
class ParameterStore {
 public:
  /// Registers a new parameter; throws ContractViolation on a duplicate name.
  Tensor add(const std::string& name, const Shape& shape, Init init, Rng& rng);
  Tensor add(const std::string& name, Tensor initial);

  Tensor get(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  std::size_t size() const { return params_.size(); }
  std::size_t total_elements() const;

  std::map<std::string, Parameter>& entries() { return params_; }
  const std::map<std::string, Parameter>& entries() const { return params_; }

  void zero_grad();
  std::size_t adam_steps() const { return adam_steps_; }
  void set_adam_steps(std::size_t n) { adam_steps_ = n; }

  /// Overwrites values in place (handles held by modules stay valid).
  void assign(const std::string& name, const std::vector<double>& values);

 private:
  std::map<std::string, Parameter> params_;
  std::size_t adam_steps_ = 0;
};

/// Runs reverse mode from `loss` and returns d loss / d p for every registered
/// parameter; parameters the loss does not reach get zeros.
GradientMap backward(const Tensor& loss, ParameterStore& store);

struct Linear {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out] or undefined

  static Linear create(ParameterStore& store, const std::string& name, std::size_t in,
                       std::size_t out, Rng& rng, bool with_bias = true);
  Tensor operator()(const Tensor& x) const { return linear(x, weight, bias); }
  std::size_t in_features() const { return weight.dim(0); }
  std::size_t out_features() const { return weight.dim(1); }
};

/// Two linear layers with a ReLU in between; no activation on the output.
struct Mlp {
  Linear hidden;
  Linear output;

  static Mlp create(ParameterStore& store, const std::string& name, std::size_t in,
                    std::size_t hidden_width, std::size_t out, Rng& rng);
  Tensor operator()(const Tensor& x) const { return output(relu(hidden(x))); }
};

struct LstmState {
  Tensor hidden;  // [n, H]
  Tensor cell;    // [n, H]
  static LstmState zeros(std::size_t rows, std::size_t width);
};

/// Standard LSTM cell, batched over rows. Gate layout in the fused weight
/// columns: input, forget, candidate, output.
///   i = sig(x Wi + h Ui + bi), f = sig(...), g = tanh(...), o = sig(...)
///   c' = f * c + i * g,  h' = o * tanh(c')
struct LstmCell {
  Tensor input_weight;   // [in, 4H]
  Tensor hidden_weight;  // [H, 4H]
  Tensor bias;           // [4H]

  static LstmCell create(ParameterStore& store, const std::string& name, std::size_t in,
                         std::size_t hidden, Rng& rng);
  std::size_t input_width() const { return input_weight.dim(0); }
  std::size_t hidden_width() const { return hidden_weight.dim(0); }

  LstmState step(const Tensor& x, const LstmState& state) const;
};

/// One recurrent step from hidden state `h` with a zero cell state; returns h'.
Tensor gated_recurrent_step(const Tensor& x, const Tensor& h, const LstmCell& cell);

}  // namespace tploc
