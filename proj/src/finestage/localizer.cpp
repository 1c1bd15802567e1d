#include "tploc/finestage/localizer.hpp"

#include "tploc/errors.hpp"
#include "tploc/frontends/encoders.hpp"

namespace tploc::finestage {

FusionBlock FusionBlock::create(ParameterStore& store, const std::string& name, std::size_t text_width,
                                std::size_t object_width, std::size_t width, Rng& rng) {
  FusionBlock b;
  b.query = Linear::create(store, name + ".query", text_width, width, rng);
  b.key = Linear::create(store, name + ".key", object_width, width, rng, false);
  b.value = Linear::create(store, name + ".value", object_width, width, rng);
  b.cell = LstmCell::create(store, name + ".cell", width, width, rng);
  return b;
}

FineLocalizer FineLocalizer::create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                    std::size_t width, std::size_t num_blocks, Rng& rng) {
  if (num_blocks == 0) throw ConfigError("fine localizer: need at least one fusion block");
  FineLocalizer f;
  f.input = Linear::create(store, name + ".input", feature_width, width, rng);
  for (std::size_t i = 0; i < num_blocks; ++i)
    f.blocks.push_back(FusionBlock::create(store, name + ".block" + std::to_string(i), width, feature_width, width, rng));
  f.offset_head = Mlp::create(store, name + ".offset_head", width, width, 2, rng);
  f.precision_head = Mlp::create(store, name + ".precision_head", width, width, 1, rng);
  return f;
}

Tensor FineLocalizer::fuse(const Tensor& text, const Tensor& objects) const {
  if (text.rank() != 2 || text.dim(0) == 0 || objects.rank() != 2 || objects.dim(0) == 0) {
    throw ContractViolation("fine fusion: need non-empty text and object features");
  }
  Tensor x = input(text);
  auto state = LstmState::zeros(1, width());
  for (const auto& b : blocks) {
    Tensor attended = x + attention(b.query(x), b.key(objects), b.value(objects));
    std::vector<Tensor> rows;
    for (std::size_t t = 0; t < attended.dim(0); ++t) {
      state = b.cell.step(slice(attended, 0, t, 1), state);
      rows.push_back(state.hidden);
    }
    x = concat(rows, 0);
  }
  return mean_axis(x, 0, true);
}

LocalizationPrediction FineLocalizer::predict(const Tensor& fused, const scene::Vec2& center,
                                              bool use_precision) const {
  LocalizationPrediction p;
  p.delta = scale(offset_head(fused), frontends::kPositionScale);
  p.position = p.delta + Tensor::matrix(1, 2, {center.x, center.y});
  p.precision = use_precision ? add_scalar(softplus(reshape(precision_head(fused), Shape{1})), kMinPrecision)
                              : Tensor::vector({1.0});
  return p;
}

Tensor uncertainty_loss(const Tensor& position, const Tensor& precision, const Tensor& truth) {
  if (position.rank() != 2 || position.dim(1) != 2 || truth.shape() != position.shape() ||
      precision.numel() != position.dim(0)) {
    throw ContractViolation("uncertainty loss: shapes " + shape_str(position.shape()) + ", " +
                            shape_str(precision.shape()) + ", " + shape_str(truth.shape()));
  }
  for (double l : precision.values())
    if (!(l > 0.0)) throw ContractViolation("uncertainty loss: precision must be positive");
  std::size_t b = position.dim(0);
  Tensor lam = reshape(precision, Shape{b});
  Tensor l1 = sum_axis(abs(position - truth), 1);
  return mean(lam * l1 + reciprocal(lam));
}

}  // namespace tploc::finestage
