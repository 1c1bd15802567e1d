#include "tploc/diffcore/noise.hpp"

#include "tploc/errors.hpp"

namespace tploc {

Tensor NoiseSource::draw(const Shape& shape) {
  std::size_t n = shape_numel(shape);
  switch (mode_) {
    case Mode::kZero:
      return Tensor::zeros(shape);
    case Mode::kSeeded: {
      std::vector<double> v(n);
      for (auto& x : v) x = rng_.normal();
      if (recording_) tape_.push_back(v);
      return Tensor(shape, std::move(v));
    }
    case Mode::kReplay: {
      if (cursor_ >= tape_.size()) throw ContractViolation("noise: replay exhausted");
      const auto& v = tape_[cursor_++];
      if (v.size() != n) throw ContractViolation("noise: replayed draw has a different shape");
      return Tensor(shape, v);
    }
  }
  return Tensor::zeros(shape);
}

void NoiseSource::freeze() {
  if (mode_ == Mode::kSeeded) {
    mode_ = Mode::kReplay;
    cursor_ = 0;
  }
}

}  // namespace tploc
