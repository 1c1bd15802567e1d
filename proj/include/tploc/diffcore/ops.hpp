#pragma once

// Differentiable primitives. Binary elementwise ops broadcast with NumPy rules.
// Axis arguments index the input shape.

#include <cstddef>
#include <vector>

#include "tploc/diffcore/tensor.hpp"

namespace tploc {

// Elementwise
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);
Tensor reciprocal(const Tensor& a);
/// max(a, lo); gradient passes only where a > lo.
Tensor clamp_min(const Tensor& a, double lo);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }
inline Tensor operator-(const Tensor& a) { return neg(a); }

// Reductions
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor sum_axis(const Tensor& a, std::size_t axis, bool keepdim = false);
Tensor mean_axis(const Tensor& a, std::size_t axis, bool keepdim = false);
/// Max along an axis. The gradient is routed to the first maximal element.
Tensor max_axis(const Tensor& a, std::size_t axis, bool keepdim = false);
Tensor softmax(const Tensor& a, std::size_t axis);
Tensor log_softmax(const Tensor& a, std::size_t axis);

// Linear algebra
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// x[..., in] * weight[in, out] + bias[out]; leading dims of x are flattened.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Shape manipulation
Tensor reshape(const Tensor& a, const Shape& shape);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);
/// Rows of `a` (axis 0) picked by index; indices may repeat.
Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& indices);

// Composites
/// eps is added to the squared row norm.
Tensor l2_normalize_rows(const Tensor& a, double eps = 1e-24);
/// [n,d] x [m,d] -> [n,m] cosine similarities.
Tensor cosine_matrix(const Tensor& a, const Tensor& b);
/// Row-softmax of q k^T / sqrt(d): [n,d] x [m,d] -> [n,m].
Tensor attention_weights(const Tensor& q, const Tensor& k);
/// Scaled dot-product attention: rows of the output are convex combinations of v rows.
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v);

}  // namespace tploc
