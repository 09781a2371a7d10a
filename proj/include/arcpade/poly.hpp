#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "arcpade/complex.hpp"
#include "arcpade/rng.hpp"

namespace arcpade {

// Dense polynomial with complex coefficients in ascending degree order.
// An empty coefficient vector is the zero polynomial. Monic polynomials store
// the literal unit as leading coefficient.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Cplx> coeffs) : c_(std::move(coeffs)) {}

  static Polynomial zero() { return Polynomial(); }
  static Polynomial constant(const Cplx& a) { return Polynomial({a}); }
  static Polynomial monomial(mpfr_prec_t prec) {  // z
    return Polynomial({Cplx(0.0, 0.0, prec), Cplx(1.0, 0.0, prec)});
  }
  static Polynomial from_roots(const std::vector<Cplx>& roots, mpfr_prec_t prec) {
    Polynomial p({Cplx(1.0, 0.0, prec)});
    for (const auto& r : roots) p = p * Polynomial({-r, Cplx(1.0, 0.0, prec)});
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return int(c_.size()) - 1; }  // -1 for the zero polynomial
  const std::vector<Cplx>& coeffs() const { return c_; }
  const Cplx& operator[](std::size_t k) const { return c_[k]; }
  mpfr_prec_t prec() const { return c_.empty() ? 64 : c_.front().prec(); }

  Cplx eval(const Cplx& z) const {
    if (c_.empty()) return Cplx(z.prec());
    Cplx acc = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * z + c_[k];
    return acc;
  }

  // Value and first derivative in one Horner sweep.
  void eval2(const Cplx& z, Cplx& p, Cplx& dp) const {
    mpfr_prec_t pr = std::max(prec(), z.prec());
    p = Cplx(pr);
    dp = Cplx(pr);
    if (c_.empty()) return;
    p = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      dp = dp * z + p;
      p = p * z + c_[k];
    }
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<Cplx> d;
    d.reserve(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * double(k));
    return Polynomial(std::move(d));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    mpfr_prec_t pr = std::max(a.prec(), b.prec());
    std::vector<Cplx> r(a.c_.size() + b.c_.size() - 1, Cplx(pr));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Cplx> r;
    mpfr_prec_t pr = std::max(a.prec(), b.prec());
    std::size_t n = std::max(a.c_.size(), b.c_.size());
    r.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      Cplx s(pr);
      if (k < a.c_.size()) s += a.c_[k];
      if (k < b.c_.size()) s += b.c_[k];
      r.push_back(s);
    }
    return Polynomial(std::move(r));
  }

  Real max_coeff_abs() const {
    Real m(prec());
    for (const auto& a : c_) m = max(m, abs(a));
    return m;
  }

 private:
  std::vector<Cplx> c_;
};

struct RootOptions {
  int max_iter = 400;
  std::uint64_t seed = 0x15f90acdULL;
  double tol_factor = 64.0;  // residual tolerance multiple of degree*eps
};

struct RootResult {
  std::vector<Cplx> roots;    // with multiplicity
  std::vector<Real> residuals;
  bool converged = true;
};

namespace detail {

// Newton polish on the (m-1)-th derivative recovers full accuracy for a root
// of multiplicity m, which plain simultaneous iteration cannot reach.
inline Cplx refine_multiple(const Polynomial& p, const Cplx& z0, int mult, int iters = 60) {
  Polynomial d = p;
  for (int k = 1; k < mult; ++k) d = d.derivative();
  Cplx z = z0;
  Real eps = Real::two_pow(1 - long(z.prec()), z.prec());
  for (int it = 0; it < iters; ++it) {
    Cplx f, df;
    d.eval2(z, f, df);
    if (abs(df).is_zero()) break;
    Cplx step = f / df;
    z = z - step;
    if (abs(step) <= eps * (abs(z) + 1.0) * 4.0) break;
  }
  return z;
}

}  // namespace detail

// All roots with multiplicity by Aberth-Ehrlich simultaneous iteration from a
// randomly perturbed circle (deterministic seed). Each returned root satisfies
// |p(r)| <= tol * max|coeff| * max(1,|r|)^deg. Roots of multiplicity m are
// located to full precision for small m (cluster detection + derivative
// polish); very high multiplicities keep the residual guarantee only.
inline RootResult poly_roots(const Polynomial& p, const RootOptions& opt = RootOptions(),
                             bool allow_partial = false) {
  RootResult out;
  int deg = p.degree();
  if (deg < 1 || abs(p[std::size_t(deg)]).is_zero())
    throw Error(ErrorCode::DomainError, "poly_roots needs degree >= 1 and nonzero leading coefficient");
  mpfr_prec_t prec = p.prec();
  Real eps = Real::two_pow(1 - long(prec), prec);
  Real coeff_scale = p.max_coeff_abs();

  // Strip exact zero roots first.
  std::vector<Cplx> work(p.coeffs());
  while (work.size() > 1 && abs(work.front()).is_zero()) {
    out.roots.push_back(Cplx(prec));
    out.residuals.push_back(Real(prec));
    work.erase(work.begin());
  }
  Polynomial q(work);
  int n = q.degree();
  if (n == 0) return out;

  // Cauchy-style radius for the initial circle.
  Real lead = abs(q[std::size_t(n)]);
  Real radius(1.0, prec);
  for (int k = 0; k < n; ++k) radius = max(radius, abs(q[std::size_t(k)]) / lead);
  radius = radius * 0.5 + 0.5;

  SplitMix64 rng(opt.seed);
  std::vector<Cplx> z;
  z.reserve(std::size_t(n));
  Real pi = Real::pi(prec);
  for (int k = 0; k < n; ++k) {
    Real th = pi * ((2.0 * k + 1.0) / n + 0.01 * rng.sym());
    Real rr = radius * (1.0 + 0.05 * rng.sym());
    z.push_back(Cplx::polar(rr, th));
  }

  Real tol = eps * (opt.tol_factor * double(deg));
  std::vector<bool> done(std::size_t(n), false);
  bool all_done = false;
  for (int it = 0; it < opt.max_iter && !all_done; ++it) {
    all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[std::size_t(i)]) continue;
      Cplx pv, dv;
      q.eval2(z[std::size_t(i)], pv, dv);
      Real bound = tol * coeff_scale * pow(max(Real(1.0, prec), abs(z[std::size_t(i)])), Real(double(deg), prec));
      if (abs(pv) <= bound) { done[std::size_t(i)] = true; continue; }
      all_done = false;
      if (abs(dv).is_zero()) {  // nudge off a critical point
        z[std::size_t(i)] += Cplx(1e-3 * rng.sym(), 1e-3 * rng.sym(), prec);
        continue;
      }
      Cplx newton = pv / dv;
      Cplx s(prec);
      for (int j = 0; j < n; ++j)
        if (j != i) s += inv(z[std::size_t(i)] - z[std::size_t(j)]);
      Cplx denom = Cplx(1.0, 0.0, prec) - newton * s;
      Cplx step = abs(denom).is_zero() ? newton : newton / denom;
      // Limit steps to keep clustered configurations stable.
      Real sm = abs(step);
      Real cap = radius * 0.5;
      if (sm > cap) step = step * (cap / sm);
      z[std::size_t(i)] -= step;
    }
  }

  // Residuals and convergence flags.
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    Cplx pv = q.eval(z[std::size_t(i)]);
    Real bound = tol * coeff_scale * pow(max(Real(1.0, prec), abs(z[std::size_t(i)])), Real(double(deg), prec));
    if (!(abs(pv) <= bound)) ok = false;
  }

  // Merge near-coincident roots and polish cluster centers.
  std::vector<int> cluster(std::size_t(n), -1);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (cluster[std::size_t(i)] >= 0) continue;
    int g = int(groups.size());
    groups.push_back({i});
    cluster[std::size_t(i)] = g;
    for (int j = i + 1; j < n; ++j) {
      if (cluster[std::size_t(j)] >= 0) continue;
      Real d = abs(z[std::size_t(i)] - z[std::size_t(j)]);
      if (d < (abs(z[std::size_t(i)]) + 1.0) * 1e-10) {
        cluster[std::size_t(j)] = g;
        groups.back().push_back(j);
      }
    }
  }
  for (const auto& g : groups) {
    Cplx center(prec);
    for (int i : g) center += z[std::size_t(i)];
    center = center / double(g.size());
    if (g.size() > 1) center = detail::refine_multiple(q, center, int(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) {
      out.roots.push_back(center);
      out.residuals.push_back(abs(q.eval(center)));
    }
  }

  out.converged = ok;
  if (!ok && !allow_partial)
    throw Error(ErrorCode::NoConvergence,
                "root iteration did not meet the residual bound; rerun with allow_partial for partial roots");
  return out;
}

}  // namespace arcpade
