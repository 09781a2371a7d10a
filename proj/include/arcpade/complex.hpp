#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "arcpade/real.hpp"

namespace arcpade {

// Complex scalar over Real. Division uses Smith's algorithm; sqrt/log/exp are
// the principal branches.
struct Cplx {
  Real re, im;

  explicit Cplx(mpfr_prec_t prec = 64) : re(prec), im(prec) {}
  Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Cplx(double r, double i, mpfr_prec_t prec) : re(r, prec), im(i, prec) {}
  explicit Cplx(const Real& r) : re(r), im(Real(0.0, r.prec())) {}

  mpfr_prec_t prec() const { return std::max(re.prec(), im.prec()); }
  bool is_finite() const { return re.is_finite() && im.is_finite(); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  std::string str(int digits = 0) const { return re.str(digits) + (im.sign() < 0 ? "" : "+") + im.str(digits) + "i"; }

  Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
  Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
  Cplx& operator*=(const Cplx& o) { *this = *this * o; return *this; }
  Cplx& operator*=(const Real& s) { re *= s; im *= s; return *this; }
  Cplx& operator/=(const Cplx& o) { *this = *this / o; return *this; }

  friend Cplx operator-(const Cplx& a) { return Cplx(-a.re, -a.im); }
  friend Cplx operator+(const Cplx& a, const Cplx& b) { return Cplx(a.re + b.re, a.im + b.im); }
  friend Cplx operator-(const Cplx& a, const Cplx& b) { return Cplx(a.re - b.re, a.im - b.im); }
  friend Cplx operator*(const Cplx& a, const Cplx& b) {
    return Cplx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend Cplx operator*(const Cplx& a, const Real& s) { return Cplx(a.re * s, a.im * s); }
  friend Cplx operator*(const Real& s, const Cplx& a) { return a * s; }
  friend Cplx operator*(const Cplx& a, double s) { return Cplx(a.re * s, a.im * s); }
  friend Cplx operator*(double s, const Cplx& a) { return a * s; }
  friend Cplx operator/(const Cplx& a, const Real& s) { return Cplx(a.re / s, a.im / s); }
  friend Cplx operator/(const Cplx& a, double s) { return Cplx(a.re / s, a.im / s); }

  friend Cplx operator/(const Cplx& a, const Cplx& b) {
    if (abs(b.re) >= abs(b.im)) {
      if (b.re.is_zero()) throw Error(ErrorCode::DomainError, "complex division by zero");
      Real t = b.im / b.re;
      Real d = b.re + b.im * t;
      return Cplx((a.re + a.im * t) / d, (a.im - a.re * t) / d);
    }
    Real t = b.re / b.im;
    Real d = b.im + b.re * t;
    return Cplx((a.re * t + a.im) / d, (a.im * t - a.re) / d);
  }

  friend bool operator==(const Cplx& a, const Cplx& b) { return a.re == b.re && a.im == b.im; }

  friend Cplx conj(const Cplx& a) { return Cplx(a.re, -a.im); }
  friend Real abs(const Cplx& a) { return hypot(a.re, a.im); }
  friend Real norm2(const Cplx& a) { return a.re * a.re + a.im * a.im; }
  friend Real arg(const Cplx& a) { return atan2(a.im, a.re); }

  friend Cplx inv(const Cplx& a) { return Cplx(1.0, 0.0, a.prec()) / a; }

  friend Cplx sqrt(const Cplx& a) {
    mpfr_prec_t p = a.prec();
    if (a.is_zero()) return Cplx(p);
    Real m = abs(a);
    Real w = sqrt((m + abs(a.re)) * 0.5);
    if (a.re.sign() >= 0) return Cplx(w, a.im / (w * 2.0));
    Real u = abs(a.im) / (w * 2.0);
    return a.im.sign() >= 0 ? Cplx(u, w) : Cplx(u, -w);
  }

  friend Cplx exp(const Cplx& a) {
    Real e = exp(a.re);
    return Cplx(e * cos(a.im), e * sin(a.im));
  }

  friend Cplx log(const Cplx& a) {
    if (a.is_zero()) throw Error(ErrorCode::DomainError, "log of zero");
    return Cplx(log(abs(a)), arg(a));
  }

  // log(1+a) with small-argument care.
  friend Cplx log1p_c(const Cplx& a) {
    Real one(1.0, a.prec());
    Cplx w(one + a.re, a.im);
    Real m2 = norm2(w);
    // log|1+a| = 0.5*log1p(2 re a + |a|^2)
    Real lm = log1p(a.re * 2.0 + norm2(a)) * 0.5;
    (void)m2;
    return Cplx(lm, arg(w));
  }

  friend Cplx pow_real(const Cplx& a, const Real& e) { return exp(log(a) * e); }

  static Cplx i_unit(mpfr_prec_t prec) { return Cplx(0.0, 1.0, prec); }
  static Cplx polar(const Real& r, const Real& theta) { return Cplx(r * cos(theta), r * sin(theta)); }
};

inline double abs_d(const Cplx& a) {
  double x = a.re.to_double(), y = a.im.to_double();
  return std::sqrt(x * x + y * y);
}

}  // namespace arcpade
