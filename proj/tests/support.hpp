#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "invspec/base.hpp"
#include "invspec/rational.hpp"

namespace testsupport {

using invspec::cplx;

inline bool close(cplx a, cplx b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Max relative deviation of two callables over a real probe grid.
inline double max_rel_dev(const std::function<cplx(cplx)>& f, const std::function<cplx(cplx)>& g,
                          double lo, double hi, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double k = lo + (hi - lo) * i / (n - 1.0);
    cplx a = f(cplx(k, 0.0)), b = g(cplx(k, 0.0));
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
  }
  return worst;
}

// In-place radix-2 FFT, sign=+1 computes sum x_j e^{+2 pi i jk/N}.
inline void fft(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * invspec::pi / double(len);
    cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Brute-force oracle for (1/2pi) int f(k) e^{iky} dk via FFT on a wide uniform
// grid. Returns pairs (y_m, value) for y_m > 0 on the FFT-conjugate grid.
inline std::vector<std::pair<double, cplx>> fourier_oracle(const std::function<cplx(double)>& f,
                                                           double kmax, std::size_t n) {
  double dk = 2.0 * kmax / double(n);
  std::vector<cplx> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = f(-kmax + dk * (double(j) + 0.5));
  fft(samples, +1);
  double dy = 2.0 * invspec::pi / (dk * double(n));
  std::vector<std::pair<double, cplx>> out;
  for (std::size_t m = 1; m < n / 2; ++m) {
    double y = dy * double(m);
    cplx phase = std::exp(invspec::cplx(0.0, (-kmax + 0.5 * dk) * y));
    out.emplace_back(y, samples[m] * phase * dk / (2.0 * invspec::pi));
  }
  return out;
}

// Random reduced rational function with conjugate-symmetric parameters (real
// on the real axis is not required; hermitian pairing keeps tests honest).
inline invspec::rational::RationalFn random_strictly_proper(std::mt19937& rng) {
  using invspec::rational::RationalFn;
  std::uniform_int_distribution<int> npol(1, 4);
  std::uniform_real_distribution<double> re(-3.0, 3.0);
  std::uniform_real_distribution<double> im(0.2, 3.0);
  RationalFn r;
  int np = npol(rng);
  int nz = std::uniform_int_distribution<int>(0, np - 1)(rng);
  for (int i = 0; i < np; ++i) {
    double s = (rng() % 2) ? 1.0 : -1.0;
    r.poles.push_back(cplx(re(rng), s * im(rng)));
  }
  for (int i = 0; i < nz; ++i) {
    double s = (rng() % 2) ? 1.0 : -1.0;
    r.zeros.push_back(cplx(re(rng), s * im(rng)));
  }
  r.gain = cplx(re(rng), re(rng));
  if (std::abs(r.gain) < 0.1) r.gain += cplx(1.0, 0.0);
  return r;
}

} // namespace testsupport
