#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>

#include "arcpade/error.hpp"

namespace arcpade {

// Arbitrary-precision real scalar backed by MPFR (round to nearest).
// Binary operations allocate the result at the larger operand precision,
// so mixed-precision expressions never silently lose digits.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(double x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(long x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(const std::string& s, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw Error(ErrorCode::ConfigError, "cannot parse real literal '" + s + "'");
  }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, MPFR_PREC_MIN); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Decimal string with enough digits to round-trip at this precision.
  std::string str(int digits = 0) const {
    if (digits <= 0) digits = int(double(prec()) * 0.30103) + 3;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%%.%dRg", digits);
    char* out = nullptr;
    int n = mpfr_asprintf(&out, buf, v_);
    std::string s = (n >= 0 && out) ? std::string(out) : std::string("nan");
    if (out) mpfr_free_str(out);
    return s;
  }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(double x) { mpfr_mul_d(v_, v_, x, MPFR_RNDN); return *this; }
  Real& operator/=(double x) { mpfr_div_d(v_, v_, x, MPFR_RNDN); return *this; }

  friend Real operator-(const Real& a) {
    Real r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

#define ARCPADE_REAL_BINOP(op, fn)                              \
  friend Real operator op(const Real& a, const Real& b) {       \
    Real r(std::max(a.prec(), b.prec()));                       \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                            \
    return r;                                                   \
  }                                                             \
  friend Real operator op(const Real& a, double b) {            \
    Real r(a.prec());                                           \
    fn##_d(r.v_, a.v_, b, MPFR_RNDN);                           \
    return r;                                                   \
  }
  ARCPADE_REAL_BINOP(+, mpfr_add)
  ARCPADE_REAL_BINOP(-, mpfr_sub)
  ARCPADE_REAL_BINOP(*, mpfr_mul)
  ARCPADE_REAL_BINOP(/, mpfr_div)
#undef ARCPADE_REAL_BINOP

  friend Real operator+(double a, const Real& b) { return b + a; }
  friend Real operator*(double a, const Real& b) { return b * a; }
  friend Real operator-(double a, const Real& b) {
    Real r(b.prec());
    mpfr_d_sub(r.v_, a, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator/(double a, const Real& b) {
    Real r(b.prec());
    mpfr_d_div(r.v_, a, b.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
  friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
  friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
  friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
  friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

#define ARCPADE_REAL_FN1(name, fn)        \
  friend Real name(const Real& a) {       \
    Real r(a.prec());                     \
    fn(r.v_, a.v_, MPFR_RNDN);            \
    return r;                             \
  }
  ARCPADE_REAL_FN1(abs, mpfr_abs)
  ARCPADE_REAL_FN1(sqrt, mpfr_sqrt)
  ARCPADE_REAL_FN1(exp, mpfr_exp)
  ARCPADE_REAL_FN1(log, mpfr_log)
  ARCPADE_REAL_FN1(log1p, mpfr_log1p)
  ARCPADE_REAL_FN1(sin, mpfr_sin)
  ARCPADE_REAL_FN1(cos, mpfr_cos)
  ARCPADE_REAL_FN1(tanh, mpfr_tanh)
  ARCPADE_REAL_FN1(sinh, mpfr_sinh)
  ARCPADE_REAL_FN1(cosh, mpfr_cosh)
  ARCPADE_REAL_FN1(floor_r, mpfr_rint_floor)
  ARCPADE_REAL_FN1(round_r, mpfr_rint_round)
  ARCPADE_REAL_FN1(gamma_fn, mpfr_gamma)
#undef ARCPADE_REAL_FN1

  friend Real atan2(const Real& y, const Real& x) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_atan2(r.v_, y.v_, x.v_, MPFR_RNDN);
    return r;
  }
  friend Real hypot(const Real& x, const Real& y) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_hypot(r.v_, x.v_, y.v_, MPFR_RNDN);
    return r;
  }
  friend Real pow(const Real& a, const Real& b) {
    Real r(std::max(a.prec(), b.prec()));
    mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend Real pow_si(const Real& a, long n) {
    Real r(a.prec());
    mpfr_pow_si(r.v_, a.v_, n, MPFR_RNDN);
    return r;
  }
  friend Real max(const Real& a, const Real& b) { return a < b ? b : a; }
  friend Real min(const Real& a, const Real& b) { return a < b ? a : b; }

  static Real pi(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Real two_pow(long e, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }

 private:
  mpfr_t v_;
};

// Working precision plus the residual tolerance attached to it. The tolerance
// is what stabilization loops and self-checks compare against; it stays well
// above unit roundoff so quadrature refinement terminates.
struct PrecisionContext {
  mpfr_prec_t bits;
  double default_tol_exp10;  // default_tol = 10^exp

  explicit PrecisionContext(mpfr_prec_t b = 192, double tol_exp10 = 0.0) : bits(b) {
    if (bits < 64) throw Error(ErrorCode::ConfigError, "precision below 64 bits");
    double eps_exp = (1.0 - double(bits)) * 0.30103;
    default_tol_exp10 = (tol_exp10 != 0.0) ? tol_exp10 : std::max(-30.0, eps_exp + 10.0);
    if (default_tol_exp10 < eps_exp + 1.3)  // >= 16*eps
      throw Error(ErrorCode::ConfigError, "default_tol below 16*eps");
  }

  Real eps() const { return Real::two_pow(1 - long(bits), bits); }
  Real default_tol() const {
    Real t(default_tol_exp10, bits);
    Real ten(10.0, bits);
    return pow(ten, t);
  }
  Real R(double x) const { return Real(x, bits); }
  Real R(const std::string& s) const { return Real(s, bits); }
  Real pi() const { return Real::pi(bits); }
};

}  // namespace arcpade
