#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace omk::detail {

using cvec = std::vector<std::complex<double>>;

// In-place complex FFT of a power-of-two length. Plans are cached per length;
// plan creation is serialized, execution is thread-safe.
void fft_forward(cvec& data);
void fft_inverse(cvec& data);  // unnormalized

std::size_t next_pow2(std::size_t n);

// Zero-padded spectrum of a, length m. With reverse set the input is reversed
// first, which turns a convolution into a cross-correlation.
cvec padded_spectrum(const cvec& a, std::size_t m, bool reverse = false);

}  // namespace omk::detail
