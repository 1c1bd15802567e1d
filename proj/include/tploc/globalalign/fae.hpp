#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tploc/diffcore/nn.hpp"
#include "tploc/frontends/encoders.hpp"

namespace tploc::globalalign {

/// x + attention(x Wq, x Wk, x Wv).
struct SelfAttention {
  Linear query;
  Linear key;
  Linear value;

  static SelfAttention create(ParameterStore& store, const std::string& name, std::size_t width, Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

/// Instance rows sorted by 2D distance from the submap center (ties keep input order).
std::vector<std::size_t> canonical_order(const frontends::ObjectFeatureSet& objects);

/// Rows of `rows` in the given order, truncated or zero-padded to `length`.
Tensor ordered_sequence(const Tensor& rows, const std::vector<std::size_t>& order, std::size_t length);

struct FrequencyBranches {
  Tensor xi1, xi2, xi3;  // [T, Dg] subspace projections
  Tensor nu1;            // Re(dft(xi1))
  Tensor nu2;            // Im(dft(xi2))
  Tensor nu3;            // Re(idft(mask * dft(xi3)))
};

struct BranchFusion {
  Tensor omega_real;  // attention weights of nu3 queries over nu1 keys, [T, T]
  Tensor omega_imag;  // ... over nu2 keys
  Tensor combined;    // elementwise product, rows renormalized to sum 1
  Tensor kappa;       // combined * nu3
};

/// Frequency-domain submap encoder: three projections, per-column DFT along the
/// instance sequence, real / imaginary / high-pass branches, shared self-attention,
/// combined cross-attention weights, then two stacked recurrent layers over the
/// enhanced high-pass rows plus kappa. The top layer's final hidden state
/// (L2-normalized) is the descriptor.
struct FrequencyEncoder {
  Linear project_real, project_imag, project_high;
  SelfAttention shared;
  Linear fusion_query, key_real, key_imag;
  LstmCell lower, upper;

  static FrequencyEncoder create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                 std::size_t branch_width, std::size_t output_width, Rng& rng);

  /// `sequence` is [T, D] with T >= 1; throws EmptyInputError otherwise.
  FrequencyBranches branches(const Tensor& sequence) const;
  BranchFusion fuse(const Tensor& nu1, const Tensor& nu2, const Tensor& nu3) const;
  /// [1, output_width], unit norm.
  Tensor encode(const Tensor& sequence) const;
};

/// The "w/o FAE" replacement: one projection then the same stacked recurrence.
struct RecurrentEncoder {
  Linear project;
  LstmCell lower, upper;

  static RecurrentEncoder create(ParameterStore& store, const std::string& name, std::size_t feature_width,
                                 std::size_t branch_width, std::size_t output_width, Rng& rng);
  Tensor encode(const Tensor& sequence) const;
};

/// Runs two stacked cells over the rows of `sequence`; returns the top layer's last hidden state.
Tensor stacked_recurrence(const Tensor& sequence, const LstmCell& lower, const LstmCell& upper);

}  // namespace tploc::globalalign
