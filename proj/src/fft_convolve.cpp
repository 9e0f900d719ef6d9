#include "fft_convolve.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "omk/error.hpp"

namespace omk::detail {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  cvec scratch(n);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  const int len = static_cast<int>(n);
  PlanPair pp;
  pp.forward = fftw_plan_dft_1d(len, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  pp.inverse = fftw_plan_dft_1d(len, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!pp.forward || !pp.inverse) fail(ErrorCode::numeric, "FFT plan creation failed");
  return cache.emplace(n, pp).first->second;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

void fft_forward(cvec& data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(data.size()).forward, p, p);
}

void fft_inverse(cvec& data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(data.size()).inverse, p, p);
}

cvec padded_spectrum(const cvec& a, std::size_t m, bool reverse) {
  cvec out(m);
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = reverse ? a[n - 1 - i] : a[i];
  fft_forward(out);
  return out;
}

}  // namespace omk::detail
