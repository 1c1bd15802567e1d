#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tploc/diffcore/nn.hpp"
#include "tploc/instalign/edges.hpp"

namespace tploc::instalign {

/// Quadratic Bezier (1-t)^2 p0 + 2(1-t)t p1 + t^2 p2. `tau` broadcasts against the points.
Tensor bezier(const Tensor& p0, const Tensor& p1, const Tensor& p2, const Tensor& tau);

/// One refinement pass over every edge independently:
///   h = lstm(E, zero state); P0 = phi0(h); P2 = phi2(h); P1 = phi_c(P0)
///   tau = sigmoid(tau_logit); E* = tanh(bezier(P0, P1, P2, tau))
struct BeoseLayer {
  LstmCell cell;
  Linear start;    // phi0
  Linear end;      // phi2
  Linear control;  // phi_c, applied to P0
  Tensor tau_logit;  // [1]

  struct Trace {
    Tensor p0, p1, p2, tau, curve, output;
  };

  static BeoseLayer create(ParameterStore& store, const std::string& name, std::size_t width, Rng& rng);
  Trace trace(const Tensor& edges) const;
  Tensor operator()(const Tensor& edges) const { return trace(edges).output; }
};

/// Stack of BEOSE layers, each with its own parameters; output of one feeds the next.
struct Beose {
  std::vector<BeoseLayer> layers;

  /// Throws ConfigError when iterations == 0.
  static Beose create(ParameterStore& store, const std::string& name, std::size_t width,
                      std::size_t iterations, Rng& rng);
  EdgeGraph operator()(const EdgeGraph& graph) const;
};

}  // namespace tploc::instalign
