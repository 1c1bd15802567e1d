#include "tploc/globalalign/fae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tploc/diffcore/spectral.hpp"
#include "tploc/errors.hpp"

namespace tploc::globalalign {

SelfAttention SelfAttention::create(ParameterStore& store, const std::string& name, std::size_t width, Rng& rng) {
  return {Linear::create(store, name + ".query", width, width, rng),
          // No key bias: it shifts every logit in a row equally and softmax ignores it.
          Linear::create(store, name + ".key", width, width, rng, false),
          Linear::create(store, name + ".value", width, width, rng)};
}

Tensor SelfAttention::operator()(const Tensor& x) const { return x + attention(query(x), key(x), value(x)); }

std::vector<std::size_t> canonical_order(const frontends::ObjectFeatureSet& objects) {
  std::vector<double> dist;
  for (const auto& c : objects.centroids) dist.push_back(std::hypot(c.x - objects.center.x, c.y - objects.center.y));
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });
  return order;
}

Tensor ordered_sequence(const Tensor& rows, const std::vector<std::size_t>& order, std::size_t length) {
  if (length == 0) throw EmptyInputError("ordered_sequence: length must be positive");
  std::vector<std::size_t> take(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), length)));
  if (take.empty()) throw EmptyInputError("ordered_sequence: no rows");
  Tensor picked = gather_rows(rows, take);
  if (take.size() == length) return picked;
  return concat({picked, Tensor::zeros(Shape{length - take.size(), rows.dim(1)})}, 0);
}

FrequencyEncoder FrequencyEncoder::create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                          std::size_t branch_width, std::size_t output_width, Rng& rng) {
  FrequencyEncoder e;
  e.project_real = Linear::create(store, name + ".project_real", feature_width, branch_width, rng);
  // A constant offset only reaches the DC bin, which has no imaginary part and
  // is removed by the high-pass mask, so these two projections carry no bias.
  e.project_imag = Linear::create(store, name + ".project_imag", feature_width, branch_width, rng, false);
  e.project_high = Linear::create(store, name + ".project_high", feature_width, branch_width, rng, false);
  e.shared = SelfAttention::create(store, name + ".shared", branch_width, rng);
  e.fusion_query = Linear::create(store, name + ".fusion_query", branch_width, branch_width, rng);
  e.key_real = Linear::create(store, name + ".key_real", branch_width, branch_width, rng, false);
  e.key_imag = Linear::create(store, name + ".key_imag", branch_width, branch_width, rng, false);
  e.lower = LstmCell::create(store, name + ".lower", branch_width, output_width, rng);
  e.upper = LstmCell::create(store, name + ".upper", output_width, output_width, rng);
  return e;
}

FrequencyBranches FrequencyEncoder::branches(const Tensor& sequence) const {
  if (sequence.rank() != 2 || sequence.dim(0) == 0) {
    throw EmptyInputError("fae: submap sequence is empty (" + shape_str(sequence.shape()) + ")");
  }
  FrequencyBranches b;
  b.xi1 = project_real(sequence);
  b.xi2 = project_imag(sequence);
  b.xi3 = project_high(sequence);
  b.nu1 = dft(b.xi1).real;
  b.nu2 = dft(b.xi2).imag;
  b.nu3 = idft(apply_bin_mask(dft(b.xi3), high_pass_mask(sequence.dim(0))));
  return b;
}

BranchFusion FrequencyEncoder::fuse(const Tensor& nu1, const Tensor& nu2, const Tensor& nu3) const {
  BranchFusion f;
  Tensor q = fusion_query(nu3);
  f.omega_real = attention_weights(q, key_real(nu1));
  f.omega_imag = attention_weights(q, key_imag(nu2));
  Tensor product = f.omega_real * f.omega_imag;
  f.combined = product / sum_axis(product, 1, true);
  f.kappa = matmul(f.combined, nu3);
  return f;
}

Tensor stacked_recurrence(const Tensor& sequence, const LstmCell& lower, const LstmCell& upper) {
  auto s1 = LstmState::zeros(1, lower.hidden_width());
  auto s2 = LstmState::zeros(1, upper.hidden_width());
  for (std::size_t t = 0; t < sequence.dim(0); ++t) {
    s1 = lower.step(slice(sequence, 0, t, 1), s1);
    s2 = upper.step(s1.hidden, s2);
  }
  return s2.hidden;
}

Tensor FrequencyEncoder::encode(const Tensor& sequence) const {
  auto b = branches(sequence);
  Tensor high = shared(b.nu3);
  auto f = fuse(shared(b.nu1), shared(b.nu2), high);
  // The fusion attention is a residual block on its query stream (the
  // high-frequency branch); without the residual, kappa starts as a near-uniform
  // average of zero-mean rows and the recurrence sees almost no signal.
  return l2_normalize_rows(stacked_recurrence(high + f.kappa, lower, upper));
}

RecurrentEncoder RecurrentEncoder::create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                          std::size_t branch_width, std::size_t output_width, Rng& rng) {
  RecurrentEncoder e;
  e.project = Linear::create(store, name + ".project", feature_width, branch_width, rng);
  e.lower = LstmCell::create(store, name + ".lower", branch_width, output_width, rng);
  e.upper = LstmCell::create(store, name + ".upper", output_width, output_width, rng);
  return e;
}

Tensor RecurrentEncoder::encode(const Tensor& sequence) const {
  if (sequence.rank() != 2 || sequence.dim(0) == 0) throw EmptyInputError("recurrent encoder: empty sequence");
  return l2_normalize_rows(stacked_recurrence(project(sequence), lower, upper));
}

}  // namespace tploc::globalalign
