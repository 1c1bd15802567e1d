#pragma once

#include "tploc/instalign/alignment.hpp"

namespace tploc::globalalign {

struct GlobalLossTerms {
  Tensor cross;       // align(Q, P)
  Tensor text_self;   // align(Q, Q)
  Tensor point_self;  // align(P, P)
  Tensor total;
};

/// `points` and `queries` are [B, D] with row b of each describing the same place.
/// Self terms use the same bidirectional contrastive form with each row as its
/// own positive against the rest of the batch.
GlobalLossTerms global_loss(const Tensor& points, const Tensor& queries, double gamma);

struct LossToggles {
  bool spatial = true;  // instance spatial descriptors
  bool object = true;   // projected raw features
  bool global = true;
  friend bool operator==(const LossToggles&, const LossToggles&) = default;
};

struct CoarseLossTerms {
  Tensor global;
  Tensor spatial;
  Tensor object;
  Tensor total;
};

/// Unweighted sum of the enabled terms. Disabled terms are reported as constant
/// zero and contribute nothing to the gradient; undefined inputs must be disabled.
CoarseLossTerms coarse_loss(const Tensor& global, const Tensor& spatial, const Tensor& object,
                            const LossToggles& toggles);

}  // namespace tploc::globalalign
