#pragma once

#include <string>
#include <vector>

#include "tploc/diffcore/nn.hpp"
#include "tploc/instalign/alignment.hpp"

namespace tploc::instalign {

/// One linear map per modality from raw frontend features to the loss space.
struct RawProjection {
  Linear point;
  Linear text;

  static RawProjection create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                              std::size_t out_width, Rng& rng);
};

struct InstanceLosses {
  Tensor spatial;  // alignment of the spatial descriptor sets
  Tensor object;   // alignment of projected raw features
};

/// Per batch item b: point_descriptors[b] / text_descriptors[b] are the
/// aggregated node descriptors, raw_points[b] / raw_text[b] the frontend features.
InstanceLosses instance_losses(const std::vector<Tensor>& point_descriptors,
                               const std::vector<Tensor>& text_descriptors,
                               const std::vector<Tensor>& raw_points, const std::vector<Tensor>& raw_text,
                               const RawProjection& projection, double gamma,
                               AlignMode mode = AlignMode::kCorrected);

}  // namespace tploc::instalign
