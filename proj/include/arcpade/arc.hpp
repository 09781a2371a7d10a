#pragma once

#include <memory>
#include <vector>

#include "arcpade/gamma.hpp"

namespace arcpade {

// One sample of the arc F = J(Gamma) with its boundary frame. tau_plus is the
// preimage on Gamma+ (trace of phi from the left of F), tau_minus = 1/tau_plus
// the one on Gamma-; w_pm = (tau_pm - 1/tau_pm)/2 are the one-sided traces of
// sqrt(z^2-1).
struct ArcSample {
  Real theta;       // angle of the Gamma- preimage
  Cplx t;
  Cplx tau_plus, tau_minus;
  Cplx w_plus, w_minus;
  Cplx dtau_minus;  // d tau/d theta at the Gamma- node
};

class ArcF {
 public:
  std::shared_ptr<const GammaCurve> curve;
  int sample_level = 0;
  std::vector<ArcSample> samples;  // j = 0 .. N/2, oriented from -1 to +1
  std::vector<Real> arg_phi_plus;  // continuous arg tau_plus along the arc, 0 at t = +1

  // Samples come from the curve grid, capped at 2^10 nodes: the sample set
  // serves boundary diagnostics, quadrature refines on the curve directly.
  static std::shared_ptr<ArcF> build(std::shared_ptr<const GammaCurve> c, int max_level = 10) {
    auto arc = std::make_shared<ArcF>();
    arc->curve = c;
    arc->sample_level = std::min(c->base_level(), max_level);
    const auto& g = c->grid(arc->sample_level);
    std::size_t n = g.tau.size();
    mpfr_prec_t prec = c->ctx.bits;
    Real two_pi = Real::pi(prec) * 2.0;
    arc->samples.reserve(n / 2 + 1);
    for (std::size_t j = 0; j <= n / 2; ++j) {
      std::size_t im = (n / 2 + j) % n;          // Gamma- index
      std::size_t ip = (n - im) % n;             // Gamma+ index (inversion partner)
      ArcSample s{two_pi * (double(n / 2 + j) / double(n)),
                  joukowski(g.tau[im]),
                  g.tau[ip],
                  g.tau[im],
                  Cplx(prec),
                  Cplx(prec),
                  g.dtau[im]};
      s.w_plus = (s.tau_plus - inv(s.tau_plus)) * 0.5;
      s.w_minus = (s.tau_minus - inv(s.tau_minus)) * 0.5;
      arc->samples.push_back(std::move(s));
    }
    // endpoints are exact branch points: w = 0, t = tau there
    arc->samples.front().t = Cplx(-1.0, 0.0, prec);
    arc->samples.back().t = Cplx(1.0, 0.0, prec);
    // continuous argument of tau_plus from the +1 end
    std::size_t count = arc->samples.size();
    arc->arg_phi_plus.assign(count, Real(prec));
    for (std::size_t j = count - 1; j-- > 0;) {
      Cplx ratio = arc->samples[j].tau_plus / arc->samples[j + 1].tau_plus;
      arc->arg_phi_plus[j] = arc->arg_phi_plus[j + 1] + arg(ratio);
    }
    return arc;
  }

  std::size_t size() const { return samples.size(); }
  mpfr_prec_t prec() const { return curve->ctx.bits; }

  double dist_to(const Cplx& z) const {
    double best = 1e18;
    detail::cd zz(z.re.to_double(), z.im.to_double());
    for (const auto& s : samples)
      best = std::min(best, std::abs(zz - detail::cd(s.t.re.to_double(), s.t.im.to_double())));
    return best;
  }

  // Locate a point x on F: returns the angle of its Gamma- preimage.
  Real theta_of_point(const Cplx& x, double tol = 1e-9) const {
    std::size_t jbest = 0;
    double best = 1e18;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      double d = abs_d(samples[j].t - x);
      if (d < best) { best = d; jbest = j; }
    }
    mpfr_prec_t prec = x.prec();
    Real th = samples[jbest].theta;
    Cplx one(1.0, 0.0, prec);
    for (int it = 0; it < 60; ++it) {
      Cplx tau = curve->tau_at(th);
      Cplx g = joukowski(tau) - x;
      Cplx dj = (one - inv(tau * tau)) * 0.5;
      Cplx gp = dj * curve->dtau_at(th);
      Real g2 = norm2(gp);
      if (g2.is_zero()) break;
      Real step = (g.re * gp.re + g.im * gp.im) / g2;
      th -= step;
      if (abs(step).to_double() < 1e-40) break;
    }
    Cplx res = joukowski(curve->tau_at(th)) - x;
    if (abs_d(res) > tol) throw Error(ErrorCode::DomainError, "point does not lie on the arc");
    return th;
  }
};

// Exterior Joukowski preimage of z with respect to Gamma: the candidate with
// winding number zero. Behaves like 2z at infinity.
inline Cplx phi_of(const Cplx& z, const GammaCurve& curve, double on_tol = 1e-9) {
  mpfr_prec_t prec = z.prec();
  Cplx r = sqrt(z * z - Cplx(1.0, 0.0, prec));
  Cplx a = z + r, b = z - r;
  double da = curve.dist_to_nodes(a), db = curve.dist_to_nodes(b);
  double scale = curve.diameter();
  if (da < on_tol * scale && db < on_tol * scale)
    throw Error(ErrorCode::OnArc, "both Joukowski preimages lie on the curve");
  // prefer the cheap winding test; fall back to the farther candidate when
  // one preimage sits close to the curve
  bool a_out = curve.winding(a) == 0;
  bool b_out = curve.winding(b) == 0;
  if (a_out == b_out) throw Error(ErrorCode::OnArc, "preimages straddle the curve");
  return a_out ? a : b;
}

inline Cplx w_from_phi(const Cplx& phi) { return (phi - inv(phi)) * 0.5; }

// w(z) = sqrt(z^2 - 1) with the branch cut along F, w(z)/z -> 1 at infinity.
inline Cplx w_of(const Cplx& z, const GammaCurve& curve) { return w_from_phi(phi_of(z, curve)); }

// r(e; z) = (phi(z) - phi(e)) / (1 - phi(e) phi(z)) given the phi values;
// the scheme point at infinity gives r = 1/phi(z).
inline Cplx r_from_phi(const Cplx& phi_e, bool e_infinite, const Cplx& phi_z) {
  mpfr_prec_t prec = phi_z.prec();
  if (e_infinite) return inv(phi_z);
  return (phi_z - phi_e) / (Cplx(1.0, 0.0, prec) - phi_e * phi_z);
}

inline Cplx r_eval(const Cplx& e, const Cplx& z, const GammaCurve& curve) {
  return r_from_phi(phi_of(e, curve), false, phi_of(z, curve));
}

// Partner point e* making |r(e;.) r(e*;.)| constant of modulus one on the arc
// F_alpha = {(i a + x)/(1 + i a x) : x in [-1,1]}.
inline Cplx mobius_partner(const Cplx& e, const Real& alpha) {
  mpfr_prec_t prec = std::max(e.prec(), alpha.prec());
  Cplx i_unit = Cplx::i_unit(prec);
  Real one_a2 = Real(1.0, prec) - alpha * alpha;
  Cplx ebar = conj(e);
  Cplx num = i_unit * (alpha * 2.0) + ebar * one_a2;
  Cplx den = Cplx(one_a2) + i_unit * (alpha * 2.0) * ebar;
  if (abs_d(den) < 1e-14) throw Error(ErrorCode::DegenerateDenominator, "mobius partner undefined for this point");
  return num / den;
}

// The F_alpha family: Moebius image of the segment, p(x) = (i a + x)/(1 + i a x).
inline std::shared_ptr<GammaCurve> f_alpha_curve(const PrecisionContext& ctx, const Real& alpha, int m = 9) {
  Real a = alpha;
  mpfr_prec_t prec = ctx.bits;
  auto p = [a, prec](const Real& x) {
    Cplx i_unit = Cplx::i_unit(prec);
    Cplx num = i_unit * a + Cplx(x);
    Cplx den = Cplx(1.0, 0.0, prec) + i_unit * (a * x);
    return num / den;
  };
  auto dp = [a, prec](const Real& x) {
    // p'(x) = (1 + a^2) / (1 + i a x)^2
    Cplx i_unit = Cplx::i_unit(prec);
    Cplx den = Cplx(1.0, 0.0, prec) + i_unit * (a * x);
    return Cplx(Real(1.0, prec) + a * a) / (den * den);
  };
  return GammaCurve::from_parametrization(ctx, p, dp, m);
}

}  // namespace arcpade
