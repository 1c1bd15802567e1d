#include "tploc/globalalign/text_global.hpp"

#include "tploc/errors.hpp"

namespace tploc::globalalign {

Tensor channel_max_pool(const Tensor& x) {
  if (x.rank() != 2 || x.dim(1) % 2 != 0) {
    throw ContractViolation("channel_max_pool: need an even channel count, got " + shape_str(x.shape()));
  }
  return max_axis(reshape(x, Shape{x.dim(0), x.dim(1) / 2, 2}), 2);
}

TextGlobalEncoder TextGlobalEncoder::create(ParameterStore& store, const std::string& name,
                                            std::size_t feature_width, std::size_t hidden_width,
                                            std::size_t output_width, Rng& rng) {
  if (hidden_width == 0 || hidden_width % 4 != 0) {
    throw ConfigError("text global encoder: hidden width must be a positive multiple of 4");
  }
  TextGlobalEncoder e;
  e.input = Linear::create(store, name + ".input", feature_width, hidden_width, rng);
  e.first = SelfAttention::create(store, name + ".first", hidden_width, rng);
  e.second = SelfAttention::create(store, name + ".second", hidden_width / 2, rng);
  e.output = Linear::create(store, name + ".output", hidden_width / 4, output_width, rng);
  return e;
}

Tensor TextGlobalEncoder::encode(const Tensor& sentences) const {
  if (sentences.rank() != 2 || sentences.dim(0) == 0) throw EmptyInputError("text global encoder: no sentences");
  Tensor x = input(sentences);
  x = channel_max_pool(first(x));
  x = channel_max_pool(second(x));
  return l2_normalize_rows(output(max_axis(x, 0, true)));
}

}  // namespace tploc::globalalign
