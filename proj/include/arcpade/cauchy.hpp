#pragma once

#include <functional>
#include <vector>

#include "arcpade/quad.hpp"

namespace arcpade {

// A density phi on Gamma prepared for Cauchy-transform work: node samples at
// one grid level, the spectral derivative for the diagonal of the boundary
// formula, and the defining closure for refinement / off-node evaluation.
// `breaks` lists angles where phi is not analytic (weight zeros, side-aware
// junctions); when nonempty all quadrature switches to piecewise tanh-sinh.
struct GammaDensity {
  const GammaCurve* curve = nullptr;
  int level = 0;
  std::function<Cplx(const GammaPt&)> fn;
  std::vector<Cplx> values;
  std::vector<Cplx> dvalues;
  std::vector<Real> breaks;

  std::size_t size() const { return values.size(); }
};

inline GammaDensity make_density(const GammaCurve& curve, const std::function<Cplx(const GammaPt&)>& fn,
                                 std::vector<Real> breaks = {}, int level = -1) {
  GammaDensity d;
  d.curve = &curve;
  d.level = level < 0 ? std::min(curve.base_level(), 10) : level;
  d.fn = fn;
  d.breaks = std::move(breaks);
  const auto& g = curve.grid(d.level);
  std::size_t n = g.tau.size();
  d.values.reserve(n);
  for (std::size_t k = 0; k < n; ++k) d.values.push_back(fn(quad_detail::node_point(curve, d.level, k)));
  if (d.breaks.empty()) d.dvalues = spectral_derivative(d.values);
  return d;
}

inline Cplx cauchy_plus_at(const GammaDensity& d, const Real& theta0, const Cplx& phi0, int level);

// Cauchy transform C phi(z) = (1/2 pi i) closed-integral phi(tau)/(tau - z) dtau
// for z off the curve. Stabilized by refinement; rejects z hugging the curve.
inline Cplx cauchy_at(const GammaDensity& d, const Cplx& z, double tol_exp10 = 0.0) {
  const GammaCurve& curve = *d.curve;
  mpfr_prec_t prec = curve.ctx.bits;
  double spacing = curve.diameter() * 8.0 / double(std::size_t(1) << d.level);
  if (curve.dist_to_nodes(z) < spacing)
    throw Error(ErrorCode::TooCloseToCurve, "cauchy transform evaluated too close to the curve");
  Real tol = curve.ctx.default_tol();
  if (tol_exp10 != 0.0) tol = pow(Real(10.0, prec), Real(tol_exp10, prec));
  Cplx i2pi = Cplx(0.0, 2.0, prec) * Real::pi(prec);
  auto f = [&](const GammaPt& p) { return d.fn(p) * p.dtau / ((p.tau - z) * i2pi); };
  QuadResult r = stabilized_gamma(curve, f, d.breaks, tol, d.level);
  if (!r.stabilized) throw Error(ErrorCode::TooCloseToCurve, "cauchy transform did not stabilize near the curve");
  return r.value;
}

// C phi(0); the origin is always enclosed by Gamma.
inline Cplx cauchy_at_zero(const GammaDensity& d, double tol_exp10 = 0.0) {
  return cauchy_at(d, Cplx(0.0, 0.0, d.curve->ctx.bits), tol_exp10);
}

// Interior boundary values (C phi)^+ at every node of the density level.
// Subtracting phi(tau_j) removes the Cauchy kernel singularity:
//   (C phi)^+(tau_j) = phi_j + (1/2 pi i) closed-integral (phi - phi_j)/(tau - tau_j) dtau,
// and the subtracted integrand is evaluated by the trapezoid rule with its
// diagonal limit phi'(theta_j) supplied spectrally.
inline std::vector<Cplx> cauchy_plus_nodes(const GammaDensity& d) {
  const GammaCurve& curve = *d.curve;
  mpfr_prec_t prec = curve.ctx.bits;
  const auto& g = curve.grid(d.level);
  std::size_t n = g.tau.size();
  Real h = Real::pi(prec) * (2.0 / double(n));
  Cplx i2pi_inv = inv(Cplx(0.0, 2.0, prec) * Real::pi(prec));
  std::vector<Cplx> out(n, Cplx(prec));
  if (d.breaks.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      Cplx acc = d.dvalues[j];
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        acc += (d.values[k] - d.values[j]) * g.dtau[k] / (g.tau[k] - g.tau[j]);
      }
      out[j] = d.values[j] + acc * h * i2pi_inv;
    }
    return out;
  }
  Real two_pi = Real::pi(prec) * 2.0;
  for (std::size_t j = 0; j < n; ++j) {
    Real theta_j = two_pi * (double(j) / double(n));
    out[j] = cauchy_plus_at(d, theta_j, d.values[j], 8);
  }
  return out;
}

// Interior boundary value at an arbitrary on-curve angle. phi0 = phi at that
// point. Splits the contour at the evaluation point (and the density breaks)
// so tanh-sinh absorbs both the kernel's removable singularity and any weight
// singularities.
inline Cplx cauchy_plus_at(const GammaDensity& d, const Real& theta0, const Cplx& phi0, int level = 8) {
  const GammaCurve& curve = *d.curve;
  mpfr_prec_t prec = curve.ctx.bits;
  Cplx tau0 = curve.tau_at(theta0);
  Cplx i2pi_inv = inv(Cplx(0.0, 2.0, prec) * Real::pi(prec));
  auto f = [&](const GammaPt& p) { return (d.fn(p) - phi0) * p.dtau / (p.tau - tau0); };
  std::vector<Real> breaks(d.breaks);
  Real two_pi = Real::pi(prec) * 2.0;
  Real th = theta0;
  while (th >= two_pi) th -= two_pi;
  while (th < 0.0) th += two_pi;
  breaks.push_back(th);
  Cplx acc = piecewise_gamma(curve, f, breaks, level);
  return phi0 + acc * i2pi_inv;
}

}  // namespace arcpade
