#include "tploc/instalign/alignment.hpp"

#include "tploc/diffcore/ops.hpp"
#include "tploc/errors.hpp"

namespace tploc::instalign {
namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("alignment temperature gamma must be positive");
}

// [B, total_rows] matrix averaging each set's rows.
Tensor averaging_matrix(const std::vector<std::size_t>& sizes) {
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  std::vector<double> a(sizes.size() * total, 0.0);
  std::size_t col = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b)
    for (std::size_t k = 0; k < sizes[b]; ++k) a[b * total + col++] = 1.0 / static_cast<double>(sizes[b]);
  return Tensor(Shape{sizes.size(), total}, std::move(a));
}

// cos: [rows_a, rows_b]; returns [B, B] with entry (i, j) = mean over set i of
// the max over set j's columns.
Tensor mean_of_max(const Tensor& cos, const std::vector<std::size_t>& row_sizes,
                   const std::vector<std::size_t>& col_sizes) {
  std::vector<Tensor> cols;
  std::size_t start = 0;
  for (auto w : col_sizes) {
    cols.push_back(max_axis(slice(cos, 1, start, w), 1, true));
    start += w;
  }
  return matmul(averaging_matrix(row_sizes), concat(cols, 1));
}

std::vector<std::size_t> set_sizes(const std::vector<Tensor>& sets, std::size_t width, const char* side) {
  std::vector<std::size_t> sizes;
  for (const auto& s : sets) {
    if (s.rank() != 2 || s.dim(0) == 0) {
      throw ContractViolation(std::string("set_similarity: empty or non-matrix ") + side + " set");
    }
    if (s.dim(1) != width) throw ContractViolation("set_similarity: feature widths differ");
    sizes.push_back(s.dim(0));
  }
  return sizes;
}

// Diagonal of a square matrix as a [B] tensor.
Tensor diagonal(const Tensor& m) {
  std::size_t b = m.dim(0);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < b; ++i) idx.push_back(i * b + i);
  return reshape(gather_rows(reshape(m, Shape{b * b, 1}), idx), Shape{b});
}

}  // namespace

std::string_view to_string(AlignMode m) { return m == AlignMode::kCorrected ? "corrected" : "literal"; }

AlignMode parse_align_mode(std::string_view s) {
  if (s == "corrected") return AlignMode::kCorrected;
  if (s == "literal") return AlignMode::kLiteral;
  throw ConfigError("unknown alignment mode '" + std::string(s) + "'");
}

SetSimilarity set_similarity(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw ContractViolation("set_similarity: batch sizes " + std::to_string(xs.size()) + " and " +
                            std::to_string(ys.size()) + " must match and be non-zero");
  }
  std::size_t width = xs.front().rank() == 2 ? xs.front().dim(1) : 0;
  auto xsz = set_sizes(xs, width, "X");
  auto ysz = set_sizes(ys, width, "Y");
  Tensor cos = cosine_matrix(concat(xs, 0), concat(ys, 0));
  return {mean_of_max(cos, xsz, ysz), mean_of_max(transpose(cos), ysz, xsz)};
}

SetSimilarity row_similarity(const Tensor& x, const Tensor& y) {
  if (x.rank() != 2 || x.shape() != y.shape() || x.dim(0) == 0) {
    throw ContractViolation("row_similarity: shapes " + shape_str(x.shape()) + " and " + shape_str(y.shape()));
  }
  Tensor cos = cosine_matrix(x, y);
  return {cos, transpose(cos)};
}

Tensor candidate_probabilities(const Tensor& scores, double gamma) {
  require_gamma(gamma);
  return softmax(scale(scores, 1.0 / gamma), 1);
}

Tensor contrastive_loss(const SetSimilarity& s, double gamma, AlignMode mode) {
  require_gamma(gamma);
  double inv_b = 1.0 / static_cast<double>(s.x2y.dim(0));
  if (mode == AlignMode::kCorrected) {
    Tensor lx = diagonal(log_softmax(scale(s.x2y, 1.0 / gamma), 1));
    Tensor ly = diagonal(log_softmax(scale(s.y2x, 1.0 / gamma), 1));
    return scale(sum(lx + ly), -inv_b);
  }
  Tensor total = diagonal(candidate_probabilities(s.x2y, gamma)) + diagonal(candidate_probabilities(s.y2x, gamma));
  return scale(sum(log(clamp_min(add_scalar(neg(total), 1.0), kLiteralClamp))), -inv_b);
}

Tensor alignment_loss(const std::vector<Tensor>& xs, const std::vector<Tensor>& ys, double gamma, AlignMode mode) {
  return contrastive_loss(set_similarity(xs, ys), gamma, mode);
}

}  // namespace tploc::instalign
