#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace grushin::detail {

// FFTW planning is not thread-safe; execution with distinct arrays is.
std::mutex& fftw_planner_mutex();

// In-place multi-dimensional complex transform of a contiguous array.
void fft_inplace(std::complex<double>* data, const std::vector<int>& dims, int sign);

// Shared out-of-place 1-D plan of length n, for fftw_execute_dft on distinct
// 16-byte aligned arrays. Never destroyed.
fftw_plan cached_plan_1d(int n, int sign);

// Linear convolution of real sequences, truncated to `keep` terms.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t keep);

// Unnormalized transform of a zero-padded copy: the d-dimensional array `in`
// of shape n^d is placed in the low corner of a (2n)^d array, multiplied in
// frequency by symbol(k^2), transformed back and cropped. Used for -Laplacian
// multipliers on the x' box.
template <class Symbol>
void padded_laplacian_multiplier(std::complex<double>* data, int n, int d, double h,
                                 const Symbol& symbol);

}  // namespace grushin::detail

#include <cmath>
#include <numbers>

namespace grushin::detail {

template <class Symbol>
void padded_laplacian_multiplier(std::complex<double>* data, int n, int d, double h,
                                 const Symbol& symbol) {
  const int n2 = 2 * n;
  std::size_t total = 1, small = 1;
  for (int i = 0; i < d; ++i) {
    total *= std::size_t(n2);
    small *= std::size_t(n);
  }
  std::vector<std::complex<double>> buf(total, 0.0);
  auto big_index = [&](std::size_t s) {
    std::size_t idx = 0, r = s, mul = 1;
    for (int ax = d - 1; ax >= 0; --ax) {
      idx += (r % n) * mul;
      r /= n;
      mul *= n2;
    }
    return idx;
  };
  for (std::size_t s = 0; s < small; ++s) buf[big_index(s)] = data[s];
  std::vector<int> dims(d, n2);
  fft_inplace(buf.data(), dims, FFTW_FORWARD);
  const double dk = 2.0 * std::numbers::pi / (n2 * h);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    double k2 = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      int q = int(r % n2);
      r /= n2;
      int qs = q <= n ? q : q - n2;
      double k = dk * qs;
      k2 += k * k;
    }
    buf[idx] *= symbol(k2) / double(total);
  }
  fft_inplace(buf.data(), dims, FFTW_BACKWARD);
  for (std::size_t s = 0; s < small; ++s) data[s] = buf[big_index(s)];
}

}  // namespace grushin::detail
