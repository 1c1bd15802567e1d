#include "tploc/diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "tploc/errors.hpp"

namespace tploc {
namespace {

using detail::Node;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw ContractViolation(std::string(op) + ": cannot broadcast " + shape_str(a) + " with " +
                              shape_str(b));
    }
    out[i] = std::max(da, db);
  }
  return out;
}

// Flat index into `in` for every element of `out` under broadcasting.
std::vector<std::size_t> broadcast_index(const Shape& in, const Shape& out) {
  std::size_t rank = out.size();
  std::vector<std::size_t> strides(rank, 0);
  std::size_t stride = 1;
  for (std::size_t i = in.size(); i-- > 0;) {
    std::size_t oi = i + (rank - in.size());
    strides[oi] = in[i] == 1 ? 0 : stride;
    stride *= in[i];
  }
  std::size_t n = shape_numel(out);
  std::vector<std::size_t> idx(n);
  std::vector<std::size_t> counter(rank, 0);
  std::size_t offset = 0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    idx[flat] = offset;
    for (std::size_t d = rank; d-- > 0;) {
      ++counter[d];
      offset += strides[d];
      if (counter[d] < out[d]) break;
      offset -= strides[d] * counter[d];
      counter[d] = 0;
    }
  }
  return idx;
}

// f(x, y) -> value; dfa(x, y, out) and dfb(x, y, out) -> partials.
template <class F, class DA, class DB>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f, DA dfa, DB dfb) {
  const auto& av = a.values();
  const auto& bv = b.values();
  if (a.shape() == b.shape()) {
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
    return Tensor::from_op(op, a.shape(), std::move(out), {a, b}, [dfa, dfb](Node& self) {
      auto& pa = *self.parents[0];
      auto& pb = *self.parents[1];
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        double g = self.grad[i];
        if (pa.requires_grad) pa.grad[i] += g * dfa(pa.value[i], pb.value[i], self.value[i]);
        if (pb.requires_grad) pb.grad[i] += g * dfb(pa.value[i], pb.value[i], self.value[i]);
      }
    });
  }
  Shape shape = broadcast_shape(a.shape(), b.shape(), op);
  auto ia = std::make_shared<std::vector<std::size_t>>(broadcast_index(a.shape(), shape));
  auto ib = std::make_shared<std::vector<std::size_t>>(broadcast_index(b.shape(), shape));
  std::vector<double> out(shape_numel(shape));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[(*ia)[i]], bv[(*ib)[i]]);
  return Tensor::from_op(op, shape, std::move(out), {a, b}, [ia, ib, dfa, dfb](Node& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      double g = self.grad[i];
      double x = pa.value[(*ia)[i]];
      double y = pb.value[(*ib)[i]];
      if (pa.requires_grad) pa.grad[(*ia)[i]] += g * dfa(x, y, self.value[i]);
      if (pb.requires_grad) pb.grad[(*ib)[i]] += g * dfb(x, y, self.value[i]);
    }
  });
}

// f(x) -> value; df(x, y) -> derivative given input x and output y.
template <class F, class DF>
Tensor unary(const char* op, const Tensor& a, F f, DF df) {
  const auto& av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
  return Tensor::from_op(op, a.shape(), std::move(out), {a}, [df](Node& self) {
    auto& p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      p.grad[i] += self.grad[i] * df(p.value[i], self.value[i]);
    }
  });
}

struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, std::size_t axis, const char* op) {
  require(axis < s.size(), std::string(op) + ": axis " + std::to_string(axis) +
                               " out of range for " + shape_str(s));
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.len = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

Shape reduced_shape(const Shape& s, std::size_t axis, bool keepdim) {
  Shape out = s;
  if (keepdim) {
    out[axis] = 1;
  } else {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(axis));
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double x, double y, double) { return -x / (y * y); });
}

Tensor scale(const Tensor& a, double s) {
  return unary(
      "scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(
      "add_scalar", a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor softplus(const Tensor& a) {
  return unary(
      "softplus", a, [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); },
      [](double x, double) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      });
}

Tensor relu(const Tensor& a) {
  return unary(
      "relu", a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor abs(const Tensor& a) {
  return unary(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Tensor sqrt(const Tensor& a) {
  return unary(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor square(const Tensor& a) {
  return unary(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor reciprocal(const Tensor& a) {
  return unary(
      "reciprocal", a, [](double x) { return 1.0 / x; },
      [](double, double y) { return -y * y; });
}

Tensor clamp_min(const Tensor& a, double lo) {
  return unary(
      "clamp_min", a, [lo](double x) { return x > lo ? x : lo; },
      [lo](double x, double) { return x > lo ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return Tensor::from_op("sum", Shape{}, {s}, {a}, [](Node& self) {
    auto& p = *self.parents[0];
    for (auto& g : p.grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw EmptyInputError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor sum_axis(const Tensor& a, std::size_t axis, bool keepdim) {
  auto sp = split_axis(a.shape(), axis, "sum_axis");
  const auto& av = a.values();
  std::vector<double> out(sp.outer * sp.inner, 0.0);
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t l = 0; l < sp.len; ++l)
      for (std::size_t i = 0; i < sp.inner; ++i)
        out[o * sp.inner + i] += av[(o * sp.len + l) * sp.inner + i];
  return Tensor::from_op("sum_axis", reduced_shape(a.shape(), axis, keepdim), std::move(out), {a},
                         [sp](Node& self) {
                           auto& p = *self.parents[0];
                           for (std::size_t o = 0; o < sp.outer; ++o)
                             for (std::size_t l = 0; l < sp.len; ++l)
                               for (std::size_t i = 0; i < sp.inner; ++i)
                                 p.grad[(o * sp.len + l) * sp.inner + i] +=
                                     self.grad[o * sp.inner + i];
                         });
}

Tensor mean_axis(const Tensor& a, std::size_t axis, bool keepdim) {
  std::size_t len = a.dim(axis);
  if (len == 0) throw EmptyInputError("mean_axis: empty axis");
  return scale(sum_axis(a, axis, keepdim), 1.0 / static_cast<double>(len));
}

Tensor max_axis(const Tensor& a, std::size_t axis, bool keepdim) {
  auto sp = split_axis(a.shape(), axis, "max_axis");
  if (sp.len == 0) throw EmptyInputError("max_axis: empty axis");
  const auto& av = a.values();
  std::vector<double> out(sp.outer * sp.inner);
  auto arg = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      std::size_t best = o * sp.len * sp.inner + i;
      for (std::size_t l = 1; l < sp.len; ++l) {
        std::size_t idx = (o * sp.len + l) * sp.inner + i;
        if (av[idx] > av[best]) best = idx;
      }
      out[o * sp.inner + i] = av[best];
      (*arg)[o * sp.inner + i] = best;
    }
  }
  return Tensor::from_op("max_axis", reduced_shape(a.shape(), axis, keepdim), std::move(out), {a},
                         [arg](Node& self) {
                           auto& p = *self.parents[0];
                           for (std::size_t k = 0; k < arg->size(); ++k)
                             p.grad[(*arg)[k]] += self.grad[k];
                         });
}

Tensor softmax(const Tensor& a, std::size_t axis) {
  auto sp = split_axis(a.shape(), axis, "softmax");
  const auto& av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      auto at = [&](std::size_t l) { return (o * sp.len + l) * sp.inner + i; };
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < sp.len; ++l) mx = std::max(mx, av[at(l)]);
      double z = 0.0;
      for (std::size_t l = 0; l < sp.len; ++l) z += (out[at(l)] = std::exp(av[at(l)] - mx));
      for (std::size_t l = 0; l < sp.len; ++l) out[at(l)] /= z;
    }
  }
  return Tensor::from_op("softmax", a.shape(), std::move(out), {a}, [sp](Node& self) {
    auto& p = *self.parents[0];
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t i = 0; i < sp.inner; ++i) {
        auto at = [&](std::size_t l) { return (o * sp.len + l) * sp.inner + i; };
        double dot = 0.0;
        for (std::size_t l = 0; l < sp.len; ++l) dot += self.grad[at(l)] * self.value[at(l)];
        for (std::size_t l = 0; l < sp.len; ++l)
          p.grad[at(l)] += self.value[at(l)] * (self.grad[at(l)] - dot);
      }
    }
  });
}

Tensor log_softmax(const Tensor& a, std::size_t axis) {
  auto sp = split_axis(a.shape(), axis, "log_softmax");
  const auto& av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      auto at = [&](std::size_t l) { return (o * sp.len + l) * sp.inner + i; };
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < sp.len; ++l) mx = std::max(mx, av[at(l)]);
      double z = 0.0;
      for (std::size_t l = 0; l < sp.len; ++l) z += std::exp(av[at(l)] - mx);
      double lz = mx + std::log(z);
      for (std::size_t l = 0; l < sp.len; ++l) out[at(l)] = av[at(l)] - lz;
    }
  }
  return Tensor::from_op("log_softmax", a.shape(), std::move(out), {a}, [sp](Node& self) {
    auto& p = *self.parents[0];
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t i = 0; i < sp.inner; ++i) {
        auto at = [&](std::size_t l) { return (o * sp.len + l) * sp.inner + i; };
        double gsum = 0.0;
        for (std::size_t l = 0; l < sp.len; ++l) gsum += self.grad[at(l)];
        for (std::size_t l = 0; l < sp.len; ++l)
          p.grad[at(l)] += self.grad[at(l)] - std::exp(self.value[at(l)]) * gsum;
      }
    }
  });
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;

// c[n,m] += a[n,k] * b[k,m]
void gemm_nn(const double* a, const double* b, double* c, std::size_t n, std::size_t k,
             std::size_t m) {
  auto ni = static_cast<Eigen::Index>(n), ki = static_cast<Eigen::Index>(k), mi = static_cast<Eigen::Index>(m);
  Map(c, ni, mi).noalias() += ConstMap(a, ni, ki) * ConstMap(b, ki, mi);
}

// c[n,k] += g[n,m] * b[k,m]^T
void gemm_nt(const double* g, const double* b, double* c, std::size_t n, std::size_t k,
             std::size_t m) {
  auto ni = static_cast<Eigen::Index>(n), ki = static_cast<Eigen::Index>(k), mi = static_cast<Eigen::Index>(m);
  Map(c, ni, ki).noalias() += ConstMap(g, ni, mi) * ConstMap(b, ki, mi).transpose();
}

// c[k,m] += a[n,k]^T * g[n,m]
void gemm_tn(const double* a, const double* g, double* c, std::size_t n, std::size_t k,
             std::size_t m) {
  auto ni = static_cast<Eigen::Index>(n), ki = static_cast<Eigen::Index>(k), mi = static_cast<Eigen::Index>(m);
  Map(c, ki, mi).noalias() += ConstMap(a, ni, ki).transpose() * ConstMap(g, ni, mi);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0),
          "matmul: incompatible shapes " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  std::vector<double> out(n * m, 0.0);
  gemm_nn(a.values().data(), b.values().data(), out.data(), n, k, m);
  return Tensor::from_op("matmul", Shape{n, m}, std::move(out), {a, b}, [n, k, m](Node& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    if (pa.requires_grad) gemm_nt(self.grad.data(), pb.value.data(), pa.grad.data(), n, k, m);
    if (pb.requires_grad) gemm_tn(pa.value.data(), self.grad.data(), pb.grad.data(), n, k, m);
  });
}

Tensor transpose(const Tensor& a) {
  require(a.rank() == 2, "transpose: expected rank 2, got " + shape_str(a.shape()));
  std::size_t n = a.dim(0), m = a.dim(1);
  const auto& av = a.values();
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j * n + i] = av[i * m + j];
  return Tensor::from_op("transpose", Shape{m, n}, std::move(out), {a}, [n, m](Node& self) {
    auto& p = *self.parents[0];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) p.grad[i * m + j] += self.grad[j * n + i];
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require(weight.rank() == 2 && x.rank() >= 1 && x.shape().back() == weight.dim(0),
          "linear: input " + shape_str(x.shape()) + " incompatible with weight " +
              shape_str(weight.shape()));
  std::size_t in = weight.dim(0), outw = weight.dim(1);
  require(!bias.defined() || (bias.rank() == 1 && bias.dim(0) == outw),
          "linear: bias shape " + (bias.defined() ? shape_str(bias.shape()) : std::string()) +
              " does not match output width " + std::to_string(outw));
  std::size_t n = x.numel() / in;
  std::vector<double> out(n * outw, 0.0);
  if (bias.defined()) {
    const auto& bv = bias.values();
    for (std::size_t i = 0; i < n; ++i) std::copy(bv.begin(), bv.end(), out.begin() + i * outw);
  }
  gemm_nn(x.values().data(), weight.values().data(), out.data(), n, in, outw);
  Shape shape = x.shape();
  shape.back() = outw;
  std::vector<Tensor> parents{x, weight};
  if (bias.defined()) parents.push_back(bias);
  return Tensor::from_op("linear", shape, std::move(out), parents, [n, in, outw](Node& self) {
    auto& px = *self.parents[0];
    auto& pw = *self.parents[1];
    if (px.requires_grad) gemm_nt(self.grad.data(), pw.value.data(), px.grad.data(), n, in, outw);
    if (pw.requires_grad) gemm_tn(px.value.data(), self.grad.data(), pw.grad.data(), n, in, outw);
    if (self.parents.size() > 2 && self.parents[2]->requires_grad) {
      auto& pb = *self.parents[2];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < outw; ++j) pb.grad[j] += self.grad[i * outw + j];
    }
  });
}

Tensor reshape(const Tensor& a, const Shape& shape) {
  require(shape_numel(shape) == a.numel(),
          "reshape: " + shape_str(a.shape()) + " -> " + shape_str(shape));
  std::vector<double> out(a.values().begin(), a.values().end());
  return Tensor::from_op("reshape", shape, std::move(out), {a}, [](Node& self) {
    auto& p = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) p.grad[i] += self.grad[i];
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  require(!parts.empty(), "concat: no inputs");
  Shape shape = parts[0].shape();
  require(axis < shape.size(), "concat: axis out of range");
  std::vector<std::size_t> lens;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape s = p.shape();
    require(s.size() == shape.size(), "concat: rank mismatch");
    for (std::size_t d = 0; d < s.size(); ++d) {
      require(d == axis || s[d] == shape[d], "concat: shape mismatch " + shape_str(s) + " vs " +
                                                 shape_str(shape) + " on axis " +
                                                 std::to_string(axis));
    }
    lens.push_back(s[axis]);
    total += s[axis];
  }
  shape[axis] = total;
  auto sp = split_axis(shape, axis, "concat");
  std::vector<double> out(shape_numel(shape));
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& pv = parts[k].values();
    std::size_t chunk = lens[k] * sp.inner;
    for (std::size_t o = 0; o < sp.outer; ++o)
      std::copy(pv.begin() + o * chunk, pv.begin() + (o + 1) * chunk,
                out.begin() + o * total * sp.inner + offset * sp.inner);
    offset += lens[k];
  }
  return Tensor::from_op("concat", shape, std::move(out), parts, [sp, lens, total](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      auto& p = *self.parents[k];
      std::size_t chunk = lens[k] * sp.inner;
      if (p.requires_grad) {
        for (std::size_t o = 0; o < sp.outer; ++o)
          for (std::size_t c = 0; c < chunk; ++c)
            p.grad[o * chunk + c] += self.grad[o * total * sp.inner + offset * sp.inner + c];
      }
      offset += lens[k];
    }
  });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  auto sp = split_axis(a.shape(), axis, "slice");
  require(start + length <= sp.len, "slice: range [" + std::to_string(start) + ", " +
                                        std::to_string(start + length) + ") exceeds axis of " +
                                        std::to_string(sp.len));
  Shape shape = a.shape();
  shape[axis] = length;
  const auto& av = a.values();
  std::vector<double> out(shape_numel(shape));
  std::size_t chunk = length * sp.inner;
  for (std::size_t o = 0; o < sp.outer; ++o)
    std::copy(av.begin() + (o * sp.len + start) * sp.inner,
              av.begin() + (o * sp.len + start) * sp.inner + chunk, out.begin() + o * chunk);
  return Tensor::from_op("slice", shape, std::move(out), {a}, [sp, start, chunk](Node& self) {
    auto& p = *self.parents[0];
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t c = 0; c < chunk; ++c)
        p.grad[(o * sp.len + start) * sp.inner + c] += self.grad[o * chunk + c];
  });
}

Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& indices) {
  require(a.rank() >= 1, "gather_rows: scalar input");
  std::size_t rows = a.dim(0);
  std::size_t width = rows ? a.numel() / rows : 0;
  Shape shape = a.shape();
  shape[0] = indices.size();
  const auto& av = a.values();
  std::vector<double> out(indices.size() * width);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    require(indices[r] < rows, "gather_rows: index " + std::to_string(indices[r]) +
                                   " out of range " + std::to_string(rows));
    std::copy(av.begin() + indices[r] * width, av.begin() + (indices[r] + 1) * width,
              out.begin() + r * width);
  }
  return Tensor::from_op("gather_rows", shape, std::move(out), {a},
                         [indices, width](Node& self) {
                           auto& p = *self.parents[0];
                           for (std::size_t r = 0; r < indices.size(); ++r)
                             for (std::size_t c = 0; c < width; ++c)
                               p.grad[indices[r] * width + c] += self.grad[r * width + c];
                         });
}

Tensor l2_normalize_rows(const Tensor& a, double eps) {
  require(a.rank() == 2, "l2_normalize_rows: expected rank 2, got " + shape_str(a.shape()));
  Tensor norm = sqrt(add_scalar(sum_axis(square(a), 1, true), eps));
  return div(a, norm);
}

Tensor cosine_matrix(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(1),
          "cosine_matrix: incompatible shapes " + shape_str(a.shape()) + ", " +
              shape_str(b.shape()));
  return matmul(l2_normalize_rows(a), transpose(l2_normalize_rows(b)));
}

Tensor attention_weights(const Tensor& q, const Tensor& k) {
  require(q.rank() == 2 && k.rank() == 2 && q.dim(1) == k.dim(1),
          "attention: query " + shape_str(q.shape()) + " incompatible with key " +
              shape_str(k.shape()));
  double s = 1.0 / std::sqrt(static_cast<double>(q.dim(1)));
  return softmax(scale(matmul(q, transpose(k)), s), 1);
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v) {
  require(v.rank() == 2 && v.dim(0) == k.dim(0),
          "attention: value " + shape_str(v.shape()) + " incompatible with key " +
              shape_str(k.shape()));
  return matmul(attention_weights(q, k), v);
}

}  // namespace tploc
