#pragma once

#include <cstddef>
#include <vector>

#include "tploc/diffcore/tensor.hpp"

namespace tploc {

/// Real and imaginary parts of a spectrum, same shape.
struct ComplexSpectrum {
  Tensor real;
  Tensor imag;
};

/// Z[m] = sum_t x[t] exp(-2*pi*i*m*t/T), taken along axis 0 of a [T] or [T, D] tensor
/// (each column transformed independently). Differentiable through both parts.
/// Throws EmptyInputError when T == 0.
ComplexSpectrum dft(const Tensor& x);

/// Real part of the inverse transform, (1/T) sum_m Z[m] exp(2*pi*i*m*t/T).
ComplexSpectrum idft_complex(const ComplexSpectrum& z);
Tensor idft(const ComplexSpectrum& z);

/// Binary high-pass mask over T bins: bin m is kept iff m >= 0.7 T.
std::vector<double> high_pass_mask(std::size_t length);

/// Multiplies every column of both spectrum parts by a per-bin mask.
ComplexSpectrum apply_bin_mask(const ComplexSpectrum& z, const std::vector<double>& mask);

}  // namespace tploc
