#include "tploc/instalign/instance_loss.hpp"

namespace tploc::instalign {

RawProjection RawProjection::create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                    std::size_t out_width, Rng& rng) {
  return {Linear::create(store, name + ".point", feature_width, out_width, rng),
          Linear::create(store, name + ".text", feature_width, out_width, rng)};
}

InstanceLosses instance_losses(const std::vector<Tensor>& point_descriptors,
                               const std::vector<Tensor>& text_descriptors,
                               const std::vector<Tensor>& raw_points, const std::vector<Tensor>& raw_text,
                               const RawProjection& projection, double gamma, AlignMode mode) {
  std::vector<Tensor> vp, tp;
  for (const auto& v : raw_points) vp.push_back(projection.point(v));
  for (const auto& t : raw_text) tp.push_back(projection.text(t));
  return {alignment_loss(point_descriptors, text_descriptors, gamma, mode), alignment_loss(vp, tp, gamma, mode)};
}

}  // namespace tploc::instalign
