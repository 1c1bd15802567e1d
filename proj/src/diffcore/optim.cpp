#include "tploc/diffcore/optim.hpp"

#include <cmath>

#include "tploc/errors.hpp"

namespace tploc {

void adam_step(ParameterStore& store, const GradientMap& grads, const AdamOptions& options) {
  for (const auto& [name, p] : store.entries()) {
    auto it = grads.find(name);
    if (it == grads.end()) throw ContractViolation("adam: missing gradient for " + name);
    if (it->second.size() != p.value.numel()) {
      throw ContractViolation("adam: gradient size mismatch for " + name);
    }
  }
  store.set_adam_steps(store.adam_steps() + 1);
  double t = static_cast<double>(store.adam_steps());
  double c1 = 1.0 - std::pow(options.beta1, t);
  double c2 = 1.0 - std::pow(options.beta2, t);
  for (auto& [name, p] : store.entries()) {
    const auto& g = grads.at(name);
    auto w = p.value.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      double& m = p.first_moment[i];
      double& v = p.second_moment[i];
      m = options.beta1 * m + (1.0 - options.beta1) * g[i];
      v = options.beta2 * v + (1.0 - options.beta2) * g[i] * g[i];
      w[i] -= options.learning_rate * (m / c1) / (std::sqrt(v / c2) + options.epsilon);
    }
  }
}

}  // namespace tploc
