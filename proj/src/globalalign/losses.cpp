#include "tploc/globalalign/losses.hpp"

#include "tploc/diffcore/ops.hpp"
#include "tploc/errors.hpp"

namespace tploc::globalalign {

using instalign::contrastive_loss;
using instalign::row_similarity;

GlobalLossTerms global_loss(const Tensor& points, const Tensor& queries, double gamma) {
  GlobalLossTerms t;
  t.cross = contrastive_loss(row_similarity(queries, points), gamma);
  t.text_self = contrastive_loss(row_similarity(queries, queries), gamma);
  t.point_self = contrastive_loss(row_similarity(points, points), gamma);
  t.total = t.cross + t.text_self + t.point_self;
  return t;
}

CoarseLossTerms coarse_loss(const Tensor& global, const Tensor& spatial, const Tensor& object,
                            const LossToggles& toggles) {
  if (!toggles.global && !toggles.spatial && !toggles.object) {
    throw ConfigError("coarse loss: every term is disabled");
  }
  CoarseLossTerms t;
  Tensor zero = Tensor::scalar(0.0);
  auto pick = [&](bool on, const Tensor& term, const char* name) {
    if (!on) return zero;
    if (!term.defined()) throw ContractViolation(std::string("coarse loss: enabled term '") + name + "' missing");
    return reshape(term, Shape{});
  };
  t.global = pick(toggles.global, global, "global");
  t.spatial = pick(toggles.spatial, spatial, "spatial");
  t.object = pick(toggles.object, object, "object");
  std::vector<Tensor> on;
  if (toggles.global) on.push_back(t.global);
  if (toggles.spatial) on.push_back(t.spatial);
  if (toggles.object) on.push_back(t.object);
  t.total = on.front();
  for (std::size_t i = 1; i < on.size(); ++i) t.total = t.total + on[i];
  return t;
}

}  // namespace tploc::globalalign
