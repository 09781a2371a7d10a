#pragma once

#include <cstddef>
#include <vector>

#include "arcpade/complex.hpp"

namespace arcpade {

// In-place radix-2 FFT at working precision. Sizes are powers of two; the
// transform is unnormalized (divide by N after the forward pass for DFT
// coefficients of samples).
inline void fft_pow2(std::vector<Cplx>& a, bool inverse) {
  std::size_t n = a.size();
  if (n < 2) return;
  if ((n & (n - 1)) != 0) throw Error(ErrorCode::DomainError, "fft size must be a power of two");
  mpfr_prec_t prec = a.front().prec();

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  Real two_pi = Real::pi(prec) * 2.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    Real ang = two_pi / double(len) * (inverse ? 1.0 : -1.0);
    Cplx wl = Cplx::polar(Real(1.0, prec), ang);
    for (std::size_t i = 0; i < n; i += len) {
      Cplx w(1.0, 0.0, prec);
      for (std::size_t k = 0; k < len / 2; ++k) {
        Cplx u = a[i + k];
        Cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w = w * wl;
      }
    }
  }
}

// DFT coefficients c_j = (1/N) sum_k f_k e^{-i j theta_k} of periodic samples.
inline std::vector<Cplx> dft_coeffs(const std::vector<Cplx>& samples) {
  std::vector<Cplx> a(samples);
  fft_pow2(a, false);
  double inv = 1.0 / double(samples.size());
  for (auto& v : a) v = v * inv;
  return a;
}

// Signed frequency of coefficient slot j for an N-point DFT.
inline long dft_freq(std::size_t j, std::size_t n) {
  return j < n / 2 ? long(j) : long(j) - long(n);
}

// Evaluate a trigonometric series sum_j c_j e^{i freq(j) theta} at theta.
inline Cplx trig_eval(const std::vector<Cplx>& c, const Real& theta) {
  mpfr_prec_t prec = c.empty() ? theta.prec() : c.front().prec();
  std::size_t n = c.size();
  Cplx e = Cplx::polar(Real(1.0, prec), theta);
  Cplx einv = conj(e);  // |e| = 1
  Cplx epow(1.0, 0.0, prec), empow(1.0, 0.0, prec);
  Cplx sum = c.empty() ? Cplx(prec) : c[0];
  for (std::size_t k = 1; k <= n / 2; ++k) {
    epow = epow * e;
    empow = empow * einv;
    if (k < n / 2) {
      sum += c[k] * epow;
      sum += c[n - k] * empow;
    } else {
      sum += c[n / 2] * empow;  // Nyquist slot, frequency -n/2
    }
  }
  return sum;
}

// Derivative of the series at theta.
inline Cplx trig_eval_derivative(const std::vector<Cplx>& c, const Real& theta) {
  mpfr_prec_t prec = c.empty() ? theta.prec() : c.front().prec();
  std::size_t n = c.size();
  Cplx e = Cplx::polar(Real(1.0, prec), theta);
  Cplx einv = conj(e);
  Cplx i_unit = Cplx::i_unit(prec);
  Cplx epow(1.0, 0.0, prec), empow(1.0, 0.0, prec);
  Cplx sum(prec);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    epow = epow * e;
    empow = empow * einv;
    if (k < n / 2) {
      sum += c[k] * epow * (i_unit * double(k));
      sum += c[n - k] * empow * (i_unit * -double(k));
    } else {
      sum += c[n / 2] * empow * (i_unit * -double(k));
    }
  }
  return sum;
}

// Spectral derivative samples f'(theta_k) from samples f(theta_k).
inline std::vector<Cplx> spectral_derivative(const std::vector<Cplx>& samples) {
  std::size_t n = samples.size();
  mpfr_prec_t prec = samples.empty() ? 64 : samples.front().prec();
  std::vector<Cplx> c = dft_coeffs(samples);
  Cplx i_unit = Cplx::i_unit(prec);
  for (std::size_t j = 0; j < n; ++j) c[j] = c[j] * (i_unit * double(dft_freq(j, n)));
  fft_pow2(c, true);
  return c;
}

// Relative weight of the upper half of the spectrum; the resolution check for
// trigonometric fits.
inline double spectral_tail(const std::vector<Cplx>& coeffs) {
  double total = 0.0, tail = 0.0;
  std::size_t n = coeffs.size();
  for (std::size_t j = 0; j < n; ++j) {
    double m = abs_d(coeffs[j]);
    total += m;
    long f = dft_freq(j, n);
    if (std::size_t(f < 0 ? -f : f) > n / 4) tail += m;
  }
  return total > 0 ? tail / total : 0.0;
}

}  // namespace arcpade
