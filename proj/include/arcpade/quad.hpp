#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "arcpade/arc.hpp"

namespace arcpade {

// Point on Gamma handed to integrands: angle, node, derivative, and the
// boundary frame of the arc point underneath it.
struct GammaPt {
  Real theta;
  Cplx tau;
  Cplx dtau;
  Cplx t;  // J(tau)
};

using GammaFn = std::function<Cplx(const GammaPt&)>;

struct QuadResult {
  Cplx value;
  int level = 0;       // grid level (log2 nodes) or tanh-sinh level
  bool stabilized = true;
  double change = 0;   // |last doubling change| relative to scale
};

namespace quad_detail {

inline GammaPt node_point(const GammaCurve& curve, int m, std::size_t k) {
  const auto& g = curve.grid(m);
  std::size_t n = g.tau.size();
  mpfr_prec_t prec = curve.ctx.bits;
  Real theta = Real::pi(prec) * (2.0 * double(k) / double(n));
  return GammaPt{theta, g.tau[k], g.dtau[k], joukowski(g.tau[k])};
}

inline GammaPt theta_point(const GammaCurve& curve, const Real& theta) {
  Cplx tau = curve.tau_at(theta);
  return GammaPt{theta, tau, curve.dtau_at(theta), joukowski(tau)};
}

}  // namespace quad_detail

// Trapezoid sum of f over the full closed curve at grid level m:
// (2 pi / N) * sum f(node_k). Spectrally accurate for analytic f.
inline Cplx trapezoid_gamma(const GammaCurve& curve, const GammaFn& f, int m) {
  const auto& g = curve.grid(m);
  std::size_t n = g.tau.size();
  mpfr_prec_t prec = curve.ctx.bits;
  Cplx acc(prec);
  for (std::size_t k = 0; k < n; ++k) acc += f(quad_detail::node_point(curve, m, k));
  return acc * (Real::pi(prec) * (2.0 / double(n)));
}

// Double-exponential quadrature over (theta_a, theta_b); tolerates integrable
// endpoint singularities. f receives curve points at arbitrary angles.
inline Cplx tanh_sinh_gamma(const GammaCurve& curve, const GammaFn& f, const Real& a, const Real& b,
                            int level) {
  mpfr_prec_t prec = curve.ctx.bits;
  Real pi = Real::pi(prec);
  double U = std::log((double(prec) * 0.7 + 60.0) * 2.0 / M_PI) + 0.3;
  long half = (std::size_t(1) << level);
  Real h(U / double(half), prec);
  Real c = (a + b) * 0.5;
  Real r = (b - a) * 0.5;
  Cplx acc(prec);
  for (long k = -half; k <= half; ++k) {
    Real u = h * double(k);
    Real y = pi * 0.5 * sinh(u);
    // stable distances to the endpoints: 1 -+ tanh(y) = 2q/(1+q), q = e^{-2|y|}
    Real q = exp(abs(y) * -2.0);
    Real s = q * 2.0 / (q + 1.0);
    Real weight = pi * 0.5 * cosh(u) * (q * 4.0 / ((q + 1.0) * (q + 1.0)));
    Real x = (k < 0) ? a + r * s : b - r * s;
    if (k == 0) x = c;
    if (x <= a || x >= b) continue;  // fully underflowed node
    acc += f(quad_detail::theta_point(curve, x)) * weight;
  }
  return acc * (h * r);
}

// Integral of f over the closed curve split at the given angles; each piece is
// integrated with tanh-sinh so endpoint singularities at the breakpoints cost
// nothing. Breaks must lie in [0, 2pi).
inline Cplx piecewise_gamma(const GammaCurve& curve, const GammaFn& f, std::vector<Real> breaks, int level) {
  mpfr_prec_t prec = curve.ctx.bits;
  Real two_pi = Real::pi(prec) * 2.0;
  if (breaks.empty()) breaks.push_back(Real(0.0, prec));
  std::sort(breaks.begin(), breaks.end());
  Cplx acc(prec);
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    Real a = breaks[i];
    Real b = (i + 1 < breaks.size()) ? breaks[i + 1] : breaks.front() + two_pi;
    if (!(b > a)) continue;
    acc += tanh_sinh_gamma(curve, f, a, b, level);
  }
  return acc;
}

// Stabilized contour integral: refine (grid doubling or tanh-sinh level) until
// the change drops below tol * scale, starting from the curve base resolution.
inline QuadResult stabilized_gamma(const GammaCurve& curve, const GammaFn& f,
                                   const std::vector<Real>& breaks, const Real& tol,
                                   int min_level = 0) {
  QuadResult out;
  mpfr_prec_t prec = curve.ctx.bits;
  bool smooth = breaks.empty();
  int level = smooth ? std::max(curve.base_level(), min_level) : std::max(6, min_level);
  int cap = smooth ? GammaCurve::kMaxM : 11;
  Cplx prev = smooth ? trapezoid_gamma(curve, f, level) : piecewise_gamma(curve, f, breaks, level);
  out.value = prev;
  out.level = level;
  out.stabilized = (level >= cap);
  for (int l = level + 1; l <= cap; ++l) {
    Cplx cur = smooth ? trapezoid_gamma(curve, f, l) : piecewise_gamma(curve, f, breaks, l);
    Real scale = max(abs(cur), Real(1.0, prec));
    Real change = abs(cur - prev);
    out.value = cur;
    out.level = l;
    out.change = (change / scale).to_double();
    if (change <= tol * scale) {
      out.stabilized = true;
      return out;
    }
    out.stabilized = false;
    prev = cur;
  }
  return out;
}

// integral over F of g(t) dt / w+(t) pulled back to Gamma:
//   = -(1/2) * closed integral of g(J(tau)) dtau / tau.
// Orientation is fixed by the segment case: g == 1 gives -i pi.
inline QuadResult pullback_integral(const GammaCurve& curve,
                                    const std::function<Cplx(const GammaPt&)>& g,
                                    const std::vector<Real>& breaks = {},
                                    double tol_exp10 = 0.0, int min_level = 0) {
  mpfr_prec_t prec = curve.ctx.bits;
  Real tol = curve.ctx.default_tol();
  if (tol_exp10 != 0.0) tol = pow(Real(10.0, prec), Real(tol_exp10, prec));
  auto f = [&](const GammaPt& p) { return g(p) * (p.dtau / p.tau) * -0.5; };
  QuadResult r = stabilized_gamma(curve, f, breaks, tol, min_level);
  if (!r.stabilized)
    throw Error(ErrorCode::NotStabilized,
                "contour integral did not stabilize; integrand likely near-singular on the curve");
  return r;
}

// All moments integral over F of t^k g(t) dt/w+ for k = 0..maxdeg in one pass
// per refinement level; stabilizes on the worst relative change.
struct MomentsResult {
  std::vector<Cplx> m;
  int level = 0;
  bool stabilized = true;
  double change = 0;
};

inline MomentsResult pullback_moments(const GammaCurve& curve,
                                      const std::function<Cplx(const GammaPt&)>& g, int maxdeg,
                                      const std::vector<Real>& breaks = {}, double tol_exp10 = 0.0,
                                      int min_level = 0) {
  mpfr_prec_t prec = curve.ctx.bits;
  Real tol = curve.ctx.default_tol();
  if (tol_exp10 != 0.0) tol = pow(Real(10.0, prec), Real(tol_exp10, prec));
  bool smooth = breaks.empty();
  int level = smooth ? std::max(curve.base_level(), min_level) : std::max(6, min_level);
  int cap = smooth ? GammaCurve::kMaxM : 11;

  std::vector<Cplx> acc;
  auto run = [&](int l) {
    acc.assign(std::size_t(maxdeg) + 1, Cplx(prec));
    auto add = [&](const GammaPt& p, const Real& weight) {
      Cplx base = g(p) * (p.dtau / p.tau) * (weight * -0.5);
      Cplx tp(1.0, 0.0, prec);
      for (int k = 0; k <= maxdeg; ++k) {
        acc[std::size_t(k)] += base * tp;
        tp = tp * p.t;
      }
    };
    if (smooth) {
      const auto& gr = curve.grid(l);
      std::size_t n = gr.tau.size();
      Real h = Real::pi(prec) * (2.0 / double(n));
      for (std::size_t k = 0; k < n; ++k) add(quad_detail::node_point(curve, l, k), h);
    } else {
      // piecewise tanh-sinh accumulation
      std::vector<Real> bs(breaks);
      Real two_pi = Real::pi(prec) * 2.0;
      if (bs.empty()) bs.push_back(Real(0.0, prec));
      std::sort(bs.begin(), bs.end());
      double U = std::log((double(prec) * 0.7 + 60.0) * 2.0 / M_PI) + 0.3;
      long half = (std::size_t(1) << l);
      Real h(U / double(half), prec);
      Real pi = Real::pi(prec);
      for (std::size_t i = 0; i < bs.size(); ++i) {
        Real a = bs[i];
        Real b = (i + 1 < bs.size()) ? bs[i + 1] : bs.front() + two_pi;
        if (!(b > a)) continue;
        Real r2 = (b - a) * 0.5;
        for (long k = -half; k <= half; ++k) {
          Real u = h * double(k);
          Real y = pi * 0.5 * sinh(u);
          Real q = exp(abs(y) * -2.0);
          Real s = q * 2.0 / (q + 1.0);
          Real weight = pi * 0.5 * cosh(u) * (q * 4.0 / ((q + 1.0) * (q + 1.0)));
          Real x = (k < 0) ? a + r2 * s : b - r2 * s;
          if (k == 0) x = (a + b) * 0.5;
          if (x <= a || x >= b) continue;
          add(quad_detail::theta_point(curve, x), weight * h * r2);
        }
      }
    }
  };

  MomentsResult out;
  run(level);
  out.m = acc;
  out.level = level;
  out.stabilized = (level >= cap);
  for (int l = level + 1; l <= cap; ++l) {
    std::vector<Cplx> prev = std::move(acc);
    run(l);
    Real worst(prec);
    Real scale(1.0, prec);
    for (std::size_t k = 0; k < prev.size(); ++k) {
      worst = max(worst, abs(acc[k] - prev[k]));
      scale = max(scale, abs(acc[k]));
    }
    out.m = acc;
    out.level = l;
    out.change = (worst / scale).to_double();
    if (worst <= tol * scale) {
      out.stabilized = true;
      return out;
    }
    out.stabilized = false;
  }
  if (!out.stabilized)
    throw Error(ErrorCode::NotStabilized, "moment quadrature did not stabilize; a weight pole or zero sits too close to the curve");
  return out;
}

}  // namespace arcpade
