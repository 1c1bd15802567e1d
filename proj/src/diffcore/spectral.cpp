#include "tploc/diffcore/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tploc/diffcore/ops.hpp"
#include "tploc/errors.hpp"

namespace tploc {
namespace {

// cos/sin of 2*pi*m*t/T with the product reduced mod T for accuracy.
struct Twiddles {
  Tensor cos;
  Tensor sin;
};

Twiddles twiddles(std::size_t length) {
  std::vector<double> c(length * length), s(length * length);
  for (std::size_t m = 0; m < length; ++m) {
    for (std::size_t t = 0; t < length; ++t) {
      double angle = 2.0 * std::numbers::pi * static_cast<double>((m * t) % length) /
                     static_cast<double>(length);
      c[m * length + t] = std::cos(angle);
      s[m * length + t] = std::sin(angle);
    }
  }
  return {Tensor::matrix(length, length, std::move(c)), Tensor::matrix(length, length, std::move(s))};
}

// Views a [T] tensor as [T, 1] so transforms are plain matmuls.
Tensor as_columns(const Tensor& x) {
  if (x.rank() == 1) return reshape(x, Shape{x.dim(0), 1});
  if (x.rank() == 2) return x;
  throw ContractViolation("dft: expected rank 1 or 2, got " + shape_str(x.shape()));
}

}  // namespace

ComplexSpectrum dft(const Tensor& x) {
  if (x.rank() == 0 || x.dim(0) == 0) throw EmptyInputError("dft: empty sequence");
  Tensor cols = as_columns(x);
  auto tw = twiddles(cols.dim(0));
  Tensor re = matmul(tw.cos, cols);
  Tensor im = neg(matmul(tw.sin, cols));
  if (x.rank() == 1) return {reshape(re, x.shape()), reshape(im, x.shape())};
  return {re, im};
}

ComplexSpectrum idft_complex(const ComplexSpectrum& z) {
  if (!z.real.defined() || !z.imag.defined() || z.real.shape() != z.imag.shape()) {
    throw ContractViolation("idft: real/imag shape mismatch");
  }
  if (z.real.rank() == 0 || z.real.dim(0) == 0) throw EmptyInputError("idft: empty spectrum");
  Tensor re = as_columns(z.real);
  Tensor im = as_columns(z.imag);
  std::size_t length = re.dim(0);
  auto tw = twiddles(length);  // symmetric matrices
  double inv = 1.0 / static_cast<double>(length);
  // (re + i im)(cos + i sin) = (re cos - im sin) + i (re sin + im cos)
  Tensor out_re = scale(sub(matmul(tw.cos, re), matmul(tw.sin, im)), inv);
  Tensor out_im = scale(add(matmul(tw.sin, re), matmul(tw.cos, im)), inv);
  if (z.real.rank() == 1) {
    return {reshape(out_re, z.real.shape()), reshape(out_im, z.real.shape())};
  }
  return {out_re, out_im};
}

Tensor idft(const ComplexSpectrum& z) { return idft_complex(z).real; }

std::vector<double> high_pass_mask(std::size_t length) {
  std::vector<double> mask(length, 0.0);
  // m >= 0.7 T  <=>  10 m >= 7 T, exact in integers.
  for (std::size_t m = 0; m < length; ++m) mask[m] = (10 * m >= 7 * length) ? 1.0 : 0.0;
  return mask;
}

ComplexSpectrum apply_bin_mask(const ComplexSpectrum& z, const std::vector<double>& mask) {
  if (z.real.dim(0) != mask.size()) {
    throw ContractViolation("apply_bin_mask: mask of " + std::to_string(mask.size()) +
                            " bins for spectrum " + shape_str(z.real.shape()));
  }
  Shape s = z.real.shape();
  Shape ms(s.size(), 1);
  ms[0] = mask.size();
  Tensor m(ms, mask);
  return {mul(z.real, m), mul(z.imag, m)};
}

}  // namespace tploc
