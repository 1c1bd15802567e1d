#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tploc/diffcore/nn.hpp"

namespace tploc {

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-5;
  /// Check at most this many coordinates per tensor (evenly strided); 0 = all.
  std::size_t max_coords = 0;
  /// Lower bound on the error denominator. Central differences carry roughly
  /// 1e-10 * |f| of rounding noise, so tensors with negligible gradients are
  /// judged against this floor instead of their own (tiny) magnitude.
  double denominator_floor = 1e-8;
};

struct GradCheckEntry {
  std::string name;
  std::size_t coords_checked = 0;
  double max_abs_error = 0.0;
  /// max |analytic - numeric| / max(max |analytic|, max |numeric|, floor)
  /// over the checked coordinates of this tensor.
  double rel_error = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst_rel_error() const;
  bool passed() const;
  /// Plain-text table, one row per tensor.
  std::string table() const;
};

/// Compares reverse-mode gradients of `f` with central differences.
/// `f` must rebuild its graph from the current values of `leaves` on every call
/// and be deterministic (freeze any noise before calling).
GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::vector<std::pair<std::string, Tensor>> leaves,
                           const GradCheckOptions& options = {});

GradCheckReport grad_check(const std::function<Tensor()>& f, ParameterStore& store,
                           const GradCheckOptions& options = {});

}  // namespace tploc
