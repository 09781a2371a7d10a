#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "arcpade/cauchy.hpp"

namespace arcpade {

// Weight densities are closures over the arc point and its boundary frame, so
// side-dependent densities are expressible.
struct ArcPt {
  Cplx t;
  Cplx tau_plus, tau_minus;
};

using ArcDensity = std::function<Cplx(const ArcPt&)>;

inline ArcPt arc_pt_from_gamma(const GammaPt& p) {
  mpfr_prec_t prec = p.tau.prec();
  Real pi = Real::pi(prec);
  bool minus_half = (p.theta > pi);  // theta in (pi, 2pi) lies on the Gamma- half
  Cplx tau_minus = minus_half ? p.tau : inv(p.tau);
  return ArcPt{p.t, inv(tau_minus), tau_minus};
}

// Szego data of a weight on the arc: geometric mean, one-sided boundary values
// at the arc samples listed in sample_idx, and an evaluator on the complement.
struct SzegoData {
  Cplx gm;
  std::vector<std::size_t> sample_idx;
  std::vector<Cplx> bplus, bminus;
  std::function<Cplx(const Cplx&)> eval;
};

// Combine Szego data of two factors; boundary arrays must share a sample set.
inline SzegoData szego_product(const SzegoData& a, const SzegoData& b) {
  if (a.bplus.size() != b.bplus.size())
    throw Error(ErrorCode::DomainError, "szego_product needs matching boundary sample sets");
  SzegoData out;
  out.gm = a.gm * b.gm;
  out.sample_idx = a.sample_idx;
  for (std::size_t i = 0; i < a.bplus.size(); ++i) {
    out.bplus.push_back(a.bplus[i] * b.bplus[i]);
    out.bminus.push_back(a.bminus[i] * b.bminus[i]);
  }
  auto ea = a.eval, eb = b.eval;
  out.eval = [ea, eb](const Cplx& z) { return ea(z) * eb(z); };
  return out;
}

inline SzegoData szego_quotient(const SzegoData& a, const SzegoData& b) {
  SzegoData out;
  out.gm = a.gm / b.gm;
  out.sample_idx = a.sample_idx;
  for (std::size_t i = 0; i < a.bplus.size(); ++i) {
    out.bplus.push_back(a.bplus[i] / b.bplus[i]);
    out.bminus.push_back(a.bminus[i] / b.bminus[i]);
  }
  auto ea = a.eval, eb = b.eval;
  out.eval = [ea, eb](const Cplx& z) { return ea(z) / eb(z); };
  return out;
}

inline SzegoData szego_one(const ArcF& arc) {
  SzegoData out;
  mpfr_prec_t prec = arc.prec();
  out.gm = Cplx(1.0, 0.0, prec);
  for (std::size_t j = 0; j < arc.size(); ++j) {
    out.sample_idx.push_back(j);
    out.bplus.push_back(Cplx(1.0, 0.0, prec));
    out.bminus.push_back(Cplx(1.0, 0.0, prec));
  }
  out.eval = [prec](const Cplx&) { return Cplx(1.0, 0.0, prec); };
  return out;
}

namespace szego_detail {

// Density log h on Gamma as a continuous single branch, mirrored exactly so
// the pullback symmetry phi(tau) = phi(1/tau) holds at the nodes. The closure
// extends the branch to arbitrary angles by principal correction against the
// nearest node, which stays valid as long as the sampling resolves h.
inline GammaDensity make_log_density(const ArcF& arc, const ArcDensity& h, std::vector<Real> breaks,
                                     double zero_tol) {
  const GammaCurve& curve = *arc.curve;
  int level = arc.sample_level;
  const auto& g = curve.grid(level);
  std::size_t n = g.tau.size();
  mpfr_prec_t prec = curve.ctx.bits;

  std::vector<Cplx> hv(n / 2 + 1, Cplx(prec));
  double scale = 0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    GammaPt p{Real::pi(prec) * (2.0 * double(k) / double(n)), g.tau[k], g.dtau[k], joukowski(g.tau[k])};
    hv[k] = h(arc_pt_from_gamma(p));
    scale = std::max(scale, abs_d(hv[k]));
  }
  for (std::size_t k = 0; k <= n / 2; ++k)
    if (abs_d(hv[k]) < zero_tol * scale)
      throw Error(ErrorCode::ZeroDensity, "density vanishes at an arc sample");

  auto logs = std::make_shared<std::vector<Cplx>>(n, Cplx(prec));
  Real acc = arg(hv[0]);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    if (k > 0) {
      Real step = arg(hv[k] / hv[k - 1]);
      if (std::fabs(step.to_double()) > 0.9 * M_PI)
        throw Error(ErrorCode::UnwrapJump, "phase step exceeds pi between adjacent samples; refine the grid");
      acc += step;
    }
    (*logs)[k] = Cplx(log(abs(hv[k])), acc);
  }
  for (std::size_t k = 1; k < n / 2; ++k) (*logs)[n - k] = (*logs)[k];

  GammaDensity d;
  d.curve = &curve;
  d.level = level;
  d.values = *logs;
  d.breaks = std::move(breaks);
  d.fn = [&curve, logs, level, h, n](const GammaPt& p) {
    double pos = p.theta.to_double() / (2 * M_PI) * double(n);
    std::size_t k = std::size_t(std::llround(pos)) % n;
    Cplx val = h(arc_pt_from_gamma(p));
    const Cplx& anchor = (*logs)[k];
    Real corr = arg(val) - anchor.im;
    Real two_pi = Real::pi(val.prec()) * 2.0;
    while (corr.to_double() > M_PI) corr -= two_pi;
    while (corr.to_double() < -M_PI) corr += two_pi;
    return Cplx(log(abs(val)), anchor.im + corr);
  };
  if (d.breaks.empty()) d.dvalues = spectral_derivative(d.values);
  return d;
}

}  // namespace szego_detail

// Geometric mean of a nonvanishing density h on the arc:
//   G_h = exp{ integral over F of log h * i dt/(pi w+) } = exp{C phi(0)},
// independent of the branch of the logarithm.
inline Cplx geometric_mean(const ArcF& arc, const ArcDensity& h, const std::vector<Real>& breaks = {},
                           double zero_tol = 1e-13) {
  auto d = szego_detail::make_log_density(arc, h, breaks, zero_tol);
  return exp(cauchy_at_zero(d));
}

// Szego function of a nonvanishing density by contour quadrature:
// S_h(z) = exp{C phi(1/phi(z)) - C phi(0)} with phi = log h o J on Gamma; the
// one-sided traces come from the interior limits at the mirrored node pair.
inline SzegoData szego_function(const ArcF& arc, const ArcDensity& h, const std::vector<Real>& breaks = {},
                                double zero_tol = 1e-13, std::size_t boundary_stride = 1) {
  const GammaCurve& curve = *arc.curve;
  mpfr_prec_t prec = curve.ctx.bits;
  auto d = std::make_shared<GammaDensity>(szego_detail::make_log_density(arc, h, breaks, zero_tol));
  std::size_t n = d->values.size();

  Cplx c0 = cauchy_at_zero(*d);
  std::vector<Cplx> cplus;
  if (d->breaks.empty()) cplus = cauchy_plus_nodes(*d);

  SzegoData out;
  out.gm = exp(c0);
  Real two_pi = Real::pi(prec) * 2.0;
  for (std::size_t j = 0; j < arc.size(); j += boundary_stride) {
    std::size_t idx_minus = (n / 2 + j) % n;
    std::size_t idx_plus = (n - idx_minus) % n;
    Cplx cp_minus, cp_plus;
    if (d->breaks.empty()) {
      cp_minus = cplus[idx_minus];
      cp_plus = cplus[idx_plus];
    } else {
      cp_minus = cauchy_plus_at(*d, two_pi * (double(idx_minus) / double(n)), d->values[idx_minus], 8);
      cp_plus = cauchy_plus_at(*d, two_pi * (double(idx_plus) / double(n)), d->values[idx_plus], 8);
    }
    out.sample_idx.push_back(j);
    out.bplus.push_back(exp(cp_minus - c0));  // interior trace at the Gamma- node is the + side of F
    out.bminus.push_back(exp(cp_plus - c0));  // and at the Gamma+ node the - side
  }

  auto curve_sp = arc.curve;
  out.eval = [d, curve_sp, c0](const Cplx& z) {
    Cplx phi_z = phi_of(z, *curve_sp);
    return exp(cauchy_at(*d, inv(phi_z)) - c0);
  };
  return out;
}

// ---------------------------------------------------------------------------
// Scheme-polynomial Szego data in closed form.
//
// For v(t) = prod (t - e) over the finite scheme points,
//   G_v = prod ( -phi(e)/2 ),   S_v(z) = prod ( 1 - 1/(phi(e) phi(z)) ),
// each factor the Szego function of one linear factor; points at infinity
// contribute nothing. This realizes S_v^2 = v / (G_v r_n phi^{2n}) with the
// branch pinned by S_v(infinity) = 1.
// ---------------------------------------------------------------------------

struct SchemePointRef {
  bool infinite;
  Cplx phi_e;  // exterior preimage of the point (ignored when infinite)
};

inline SzegoData szego_of_scheme_polynomial(const ArcF& arc, const std::vector<SchemePointRef>& pts) {
  mpfr_prec_t prec = arc.prec();
  SzegoData out;
  out.gm = Cplx(1.0, 0.0, prec);
  Cplx one(1.0, 0.0, prec);
  std::vector<Cplx> finite;
  for (const auto& p : pts) {
    if (p.infinite) continue;
    finite.push_back(p.phi_e);
    out.gm = out.gm * (p.phi_e * -0.5);
  }
  for (std::size_t j = 0; j < arc.size(); ++j) {
    Cplx bp(1.0, 0.0, prec), bm(1.0, 0.0, prec);
    for (const auto& pe : finite) {
      bp = bp * (one - inv(pe * arc.samples[j].tau_plus));
      bm = bm * (one - inv(pe * arc.samples[j].tau_minus));
    }
    out.sample_idx.push_back(j);
    out.bplus.push_back(bp);
    out.bminus.push_back(bm);
  }
  auto curve_sp = arc.curve;
  auto fin = std::make_shared<std::vector<Cplx>>(std::move(finite));
  out.eval = [curve_sp, fin, prec](const Cplx& z) {
    Cplx phi_z = phi_of(z, *curve_sp);
    Cplx acc(1.0, 0.0, prec);
    Cplx one_(1.0, 0.0, prec);
    for (const auto& pe : *fin) acc = acc * (one_ - inv(pe * phi_z));
    return acc;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Vanishing density factors hbar(alpha, x; .)
//
// hbar(alpha, x; t) = |2(t-x)|^{2 alpha} e^{2 i alpha A(t)} with A a continuous
// angle of t - x along the arc: a branch of arg(t - x) past x, of arg(x - t)
// before it, anchored at the principal argument at the +1 end. Exponents are
// halved automatically when x is an endpoint.
// ---------------------------------------------------------------------------

struct HbarZeroSpec {
  Cplx x;
  Real alpha;
};

struct HbarZero {
  Cplx x;
  Real alpha_eff;
  Real theta_minus;     // Gamma- preimage angle of x
  double sample_pos;    // fractional sample index of x along the arc
  std::vector<Real> A;  // continuous angle at the arc samples
  Cplx tau_x;
  bool at_p1 = false, at_m1 = false;
};

struct HbarData {
  std::shared_ptr<const ArcF> arc;
  std::vector<HbarZero> zeros;
  std::vector<Real> breaks;  // Gamma angles of all zero preimages

  bool empty() const { return zeros.empty(); }
};

inline HbarData build_hbar(std::shared_ptr<const ArcF> arc, const std::vector<HbarZeroSpec>& specs) {
  HbarData out;
  out.arc = arc;
  mpfr_prec_t prec = arc->prec();
  Real two_pi = Real::pi(prec) * 2.0;
  std::size_t m = arc->size();
  for (const auto& spec : specs) {
    HbarZero z;
    z.x = spec.x;
    z.at_p1 = abs_d(spec.x - Cplx(1.0, 0.0, prec)) < 1e-12;
    z.at_m1 = abs_d(spec.x + Cplx(1.0, 0.0, prec)) < 1e-12;
    z.alpha_eff = (z.at_p1 || z.at_m1) ? spec.alpha * 0.5 : spec.alpha;
    z.theta_minus = z.at_p1 ? two_pi : z.at_m1 ? Real::pi(prec) : arc->theta_of_point(spec.x);
    double n_nodes = double(std::size_t(1) << arc->sample_level);
    z.sample_pos = z.theta_minus.to_double() / (2 * M_PI) * n_nodes - n_nodes / 2.0;
    z.tau_x = arc->curve->tau_at(z.theta_minus);

    z.A.assign(m, Real(prec));
    auto vec = [&](std::size_t j) {
      return (double(j) <= z.sample_pos) ? z.x - arc->samples[j].t : arc->samples[j].t - z.x;
    };
    if (z.at_p1) {
      // anchor at the -1 end: principal argument of 1 - t
      z.A[0] = arg(vec(0));
      for (std::size_t j = 1; j < m; ++j) {
        Cplx cur = vec(j), prev = vec(j - 1);
        if (abs_d(cur) == 0 || abs_d(prev) == 0) { z.A[j] = z.A[j - 1]; continue; }
        z.A[j] = z.A[j - 1] + arg(cur / prev);
      }
    } else {
      z.A[m - 1] = arg(vec(m - 1));
      for (std::size_t j = m - 1; j-- > 0;) {
        Cplx cur = vec(j), prev = vec(j + 1);
        if (abs_d(cur) == 0 || abs_d(prev) == 0) { z.A[j] = z.A[j + 1]; continue; }
        z.A[j] = z.A[j + 1] + arg(cur / prev);
      }
    }
    if (!z.at_p1 && !z.at_m1) {
      out.breaks.push_back(z.theta_minus);
      out.breaks.push_back(two_pi - z.theta_minus);
    }
    out.zeros.push_back(std::move(z));
  }
  return out;
}

inline Cplx hbar_at_sample(const HbarData& hb, std::size_t j) {
  mpfr_prec_t prec = hb.arc->prec();
  Cplx acc(1.0, 0.0, prec);
  for (const auto& z : hb.zeros) {
    Real m = abs(hb.arc->samples[j].t - z.x) * 2.0;
    Real a2 = z.alpha_eff * 2.0;
    if (m.is_zero()) return Cplx(prec);
    acc = acc * Cplx::polar(pow(m, a2), z.A[j] * a2);
  }
  return acc;
}

// hbar at an arbitrary arc point (given via its Gamma point): the continuous
// angle is continued from the nearest sample on the same side of the zero.
inline Cplx hbar_at(const HbarData& hb, const GammaPt& p) {
  mpfr_prec_t prec = hb.arc->prec();
  std::size_t m = hb.arc->size();
  Real pi = Real::pi(prec);
  Real th = p.theta;
  if (!(th > pi)) th = pi * 2.0 - th;  // fold the Gamma+ half onto Gamma-
  double n_nodes = double(std::size_t(1) << hb.arc->sample_level);
  double pos = th.to_double() / (2 * M_PI) * n_nodes - n_nodes / 2.0;
  pos = std::min(std::max(pos, 0.0), double(m - 1));
  Cplx acc(1.0, 0.0, prec);
  for (const auto& z : hb.zeros) {
    bool before = pos <= z.sample_pos;
    long js = before ? long(std::floor(pos)) : long(std::ceil(pos));
    if (before && double(js) > z.sample_pos) js = long(std::floor(z.sample_pos));
    if (!before && double(js) < z.sample_pos) js = long(std::ceil(z.sample_pos));
    js = std::min<long>(std::max<long>(js, 0), long(m - 1));
    Cplx vj = before ? z.x - hb.arc->samples[std::size_t(js)].t : hb.arc->samples[std::size_t(js)].t - z.x;
    Cplx vt = before ? z.x - p.t : p.t - z.x;
    Real m2 = abs(p.t - z.x) * 2.0;
    if (m2.is_zero()) return Cplx(prec);
    Real A = z.A[std::size_t(js)];
    if (abs_d(vj) > 0) A += arg(vt / vj);
    Real a2 = z.alpha_eff * 2.0;
    acc = acc * Cplx::polar(pow(m2, a2), A * a2);
  }
  return acc;
}

// Closed-form Szego data of the hbar product: each factor is
// [2(z-x)/phi(z)]^alpha = exp(alpha [Log(1 - tau_x/s) + Log(1 - 1/(tau_x s))])
// with s = phi(z); the geometric mean is 1.
inline SzegoData szego_of_hbar(const HbarData& hb) {
  const ArcF& arc = *hb.arc;
  mpfr_prec_t prec = arc.prec();
  SzegoData out;
  out.gm = Cplx(1.0, 0.0, prec);
  std::size_t m = arc.size();
  Real pi = Real::pi(prec);
  for (std::size_t j = 0; j < m; ++j) {
    Cplx bp(1.0, 0.0, prec), bm(1.0, 0.0, prec);
    for (const auto& z : hb.zeros) {
      bool before = double(j) <= z.sample_pos;
      if (z.at_p1) before = true;
      if (z.at_m1) before = false;
      Real dist = abs(arc.samples[j].t - z.x) * 2.0;
      if (dist.is_zero()) { bp = Cplx(prec); bm = Cplx(prec); break; }
      Real base = log(dist);
      Real arx_p = before ? z.A[j] + pi : z.A[j];
      Real arx_m = before ? z.A[j] - pi : z.A[j];
      Cplx lp(base - log(abs(arc.samples[j].tau_plus)), arx_p - arc.arg_phi_plus[j]);
      Cplx lm(base - log(abs(arc.samples[j].tau_minus)), arx_m + arc.arg_phi_plus[j]);
      bp = bp * exp(lp * z.alpha_eff);
      bm = bm * exp(lm * z.alpha_eff);
    }
    out.sample_idx.push_back(j);
    out.bplus.push_back(bp);
    out.bminus.push_back(bm);
  }
  auto curve_sp = arc.curve;
  auto zeros = std::make_shared<std::vector<HbarZero>>(hb.zeros);
  out.eval = [curve_sp, zeros, prec](const Cplx& z) {
    Cplx s = phi_of(z, *curve_sp);
    Cplx acc(1.0, 0.0, prec);
    for (const auto& zr : *zeros) {
      Cplx l = log1p_c(-(zr.tau_x / s)) + log1p_c(-inv(zr.tau_x * s));
      acc = acc * exp(l * zr.alpha_eff);
    }
    return acc;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Scattering function jump at a density zero.
//
// For the weight hbar(alpha, x; .) h the quotients scf^+- = S^+-/S^-+ jump at
// x; the measured one-sided gap is compared with
//   2 sin(alpha pi) |phi^-+(x)|^{2 alpha} |scf_h^+-(x)|.
// ---------------------------------------------------------------------------

struct ScatteringJump {
  Real numeric_plus, numeric_minus;
  Real closed_plus, closed_minus;
};

inline ScatteringJump scattering_jump(std::shared_ptr<const ArcF> arc, const ArcDensity& h, const Cplx& x,
                                      const Real& alpha, const std::vector<Real>& h_breaks = {}) {
  mpfr_prec_t prec = arc->prec();
  HbarData hb = build_hbar(arc, {{x, alpha}});
  const auto& z = hb.zeros.front();
  if (z.at_p1 || z.at_m1)
    throw Error(ErrorCode::DomainError, "scattering jump is defined at interior points of the arc");
  SzegoData sh = szego_function(*arc, h, h_breaks);
  SzegoData w = szego_product(szego_of_hbar(hb), sh);

  double pos = z.sample_pos;
  if (pos < 2.0 || pos > double(arc->size()) - 3.0)
    throw Error(ErrorCode::DomainError, "zero too close to an endpoint for the jump measurement");

  auto scf_p = [&](std::size_t j) { return w.bplus[j] / w.bminus[j]; };
  auto scf_m = [&](std::size_t j) { return w.bminus[j] / w.bplus[j]; };
  auto limit = [&](auto f, bool left) {
    long j1 = left ? long(std::floor(pos)) : long(std::ceil(pos));
    long j2 = left ? j1 - 1 : j1 + 1;
    if (!left && double(j1) == pos) { j1 += 1; j2 += 1; }
    if (left && double(j1) == pos) { j1 -= 1; j2 -= 1; }
    Cplx f1 = f(std::size_t(j1)), f2 = f(std::size_t(j2));
    Real t((pos - double(j1)) / double(j1 - j2), prec);
    return f1 + (f1 - f2) * t;
  };

  ScatteringJump out{Real(prec), Real(prec), Real(prec), Real(prec)};
  out.numeric_plus = abs(limit(scf_p, false) - limit(scf_p, true));
  out.numeric_minus = abs(limit(scf_m, false) - limit(scf_m, true));

  Real mod_phi_minus = abs(z.tau_x);  // tau_x is the Gamma- preimage of x
  Real mod_phi_plus = Real(1.0, prec) / mod_phi_minus;
  // continuous h factor at x, interpolated between the flanking samples
  std::size_t jl = std::size_t(std::floor(pos)), jr = std::size_t(std::ceil(pos));
  Real scf_h_mag = sqrt(abs(sh.bplus[jl] / sh.bminus[jl]) * abs(sh.bplus[jr] / sh.bminus[jr]));
  Real two_sin = sin(alpha * Real::pi(prec)) * 2.0;
  out.closed_plus = two_sin * pow(mod_phi_minus, alpha * 2.0) * scf_h_mag;
  out.closed_minus = two_sin * pow(mod_phi_plus, alpha * 2.0) / scf_h_mag;
  return out;
}

}  // namespace arcpade
