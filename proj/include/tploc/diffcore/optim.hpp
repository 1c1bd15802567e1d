#pragma once

#include "tploc/diffcore/nn.hpp"

namespace tploc {

/// Adam with bias correction. Moments live in the ParameterStore so a store can
/// be checkpointed and resumed.
struct AdamOptions {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Applies one update to every parameter. Throws ContractViolation when `grads`
/// lacks an entry for a registered parameter or has the wrong size.
void adam_step(ParameterStore& store, const GradientMap& grads, const AdamOptions& options);

}  // namespace tploc
