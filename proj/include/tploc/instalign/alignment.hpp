#pragma once

#include <string_view>
#include <vector>

#include "tploc/diffcore/tensor.hpp"

namespace tploc::instalign {

/// kCorrected: bidirectional contrastive loss, -(1/B) sum_b [log p_x2y[b,b] + log p_y2x[b,b]].
/// kLiteral:   -(1/B) sum_b log(max(1 - (p_x2y[b,b] + p_y2x[b,b]), 1e-6)), kept for fidelity runs.
enum class AlignMode { kCorrected, kLiteral };

std::string_view to_string(AlignMode m);
AlignMode parse_align_mode(std::string_view s);

inline constexpr double kLiteralClamp = 1e-6;

/// Batch set-to-set similarities, both [B, B]:
///   x2y[i][j] = mean over rows x of X_i of max over rows y of Y_j of cos(x, y)
///   y2x[i][j] = mean over rows y of Y_i of max over rows x of X_j of cos(y, x)
struct SetSimilarity {
  Tensor x2y;
  Tensor y2x;
};

/// Throws ContractViolation for mismatched batch sizes, widths or empty sets.
SetSimilarity set_similarity(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys);

/// Single-row sets: x2y = cosine(X, Y), y2x = its transpose.
SetSimilarity row_similarity(const Tensor& x, const Tensor& y);

/// Row-wise softmax of scores / gamma: p[i][j] over candidates j. Throws ConfigError for gamma <= 0.
Tensor candidate_probabilities(const Tensor& scores, double gamma);

/// Loss from precomputed [B, B] similarity scores.
Tensor contrastive_loss(const SetSimilarity& s, double gamma, AlignMode mode = AlignMode::kCorrected);

/// set_similarity followed by contrastive_loss.
Tensor alignment_loss(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys, double gamma,
                      AlignMode mode = AlignMode::kCorrected);

}  // namespace tploc::instalign
