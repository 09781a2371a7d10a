#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arcpade/poly.hpp"
#include "arcpade/szego.hpp"

namespace arcpade {

struct SchemePoint {
  bool infinite = false;
  Cplx e;      // z-plane location (ignored when infinite)
  Cplx phi_e;  // exterior Joukowski preimage
};

// One triangular-scheme row: 2n points with the monic polynomial carrying the
// finite ones.
struct SchemeLevel {
  int n = 0;
  std::vector<SchemePoint> points;
  Polynomial v;

  std::size_t finite_count() const {
    std::size_t c = 0;
    for (const auto& p : points)
      if (!p.infinite) ++c;
    return c;
  }

  std::vector<SchemePointRef> refs() const {
    std::vector<SchemePointRef> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.infinite, p.phi_e});
    return out;
  }

  // r_n(z) = prod over the level of r(e; z), given phi(z).
  Cplx rn_from_phi(const Cplx& phi_z) const {
    Cplx acc(1.0, 0.0, phi_z.prec());
    for (const auto& p : points) acc = acc * r_from_phi(p.phi_e, p.infinite, phi_z);
    return acc;
  }

  Cplx rn_eval(const Cplx& z, const GammaCurve& curve) const { return rn_from_phi(phi_of(z, curve)); }
};

// A point description for scheme construction: finite z or the point at
// infinity.
struct SchemeBasePoint {
  bool infinite = false;
  Cplx e;
};

namespace scheme_detail {

inline SchemePoint resolve(const ArcF& arc, const SchemeBasePoint& b, double clearance) {
  SchemePoint p;
  p.infinite = b.infinite;
  mpfr_prec_t prec = arc.prec();
  if (b.infinite) {
    p.e = Cplx(prec);
    p.phi_e = Cplx(prec);
    return p;
  }
  p.e = b.e;
  if (arc.dist_to(b.e) < clearance)
    throw Error(ErrorCode::DomainError, "scheme point violates the clearance to the arc");
  p.phi_e = phi_of(b.e, *arc.curve);
  return p;
}

inline Polynomial monic_from_points(const std::vector<SchemePoint>& pts, mpfr_prec_t prec) {
  std::vector<Cplx> roots;
  for (const auto& p : pts)
    if (!p.infinite) roots.push_back(p.e);
  return Polynomial::from_roots(roots, prec);
}

}  // namespace scheme_detail

// Level built by repeating base points 2n/k times each; when 2n is not a
// multiple of k the remaining slots cycle through the base points (padding
// must be enabled).
inline SchemeLevel generator_repetition_level(const ArcF& arc, const std::vector<SchemeBasePoint>& base,
                                              int n, bool padding = true, double clearance_rel = 1e-3) {
  if (base.empty()) throw Error(ErrorCode::ConfigError, "repetition scheme needs base points");
  SchemeLevel out;
  out.n = n;
  double clearance = clearance_rel * arc.curve->diameter();
  std::size_t k = base.size();
  std::size_t total = 2 * std::size_t(n);
  if (total % k != 0 && !padding)
    throw Error(ErrorCode::IndivisibleWithoutPadding, "2n is not a multiple of the base point count");
  std::vector<SchemePoint> resolved;
  for (const auto& b : base) resolved.push_back(scheme_detail::resolve(arc, b, clearance));
  for (std::size_t i = 0; i < total; ++i) out.points.push_back(resolved[i % k]);
  out.v = scheme_detail::monic_from_points(out.points, arc.prec());
  return out;
}

inline SchemeLevel classical_level(const ArcF& arc, int n) {
  SchemeLevel out;
  out.n = n;
  mpfr_prec_t prec = arc.prec();
  out.points.assign(2 * std::size_t(n), SchemePoint{true, Cplx(prec), Cplx(prec)});
  out.v = Polynomial({Cplx(1.0, 0.0, prec)});
  return out;
}

// Equal-flux level: the level curve {u = log rho} of the generator potential
// is partitioned into 2n arcs of equal flux of the normal derivative, and the
// flux midpoint of each arc is taken. Scheme points are the J-images; their
// exterior preimages are exactly 1/eps.
inline SchemeLevel equal_flux_level(const ArcF& arc, const GeneratorSet& gens, const Real& rho, int n) {
  const GammaCurve& curve = *arc.curve;
  mpfr_prec_t prec = curve.ctx.bits;
  if (!(rho > 0.0) || !(rho < 1.0))
    throw Error(ErrorCode::ConfigError, "equal-flux level parameter must lie in (0,1)");
  double lvl = std::log(rho.to_double());

  // start point: descend from +1 along the gradient until u = log rho
  auto gd = detail::to_double(gens);
  detail::cd start(1.0, 0.0);
  {
    double target = lvl;
    detail::cd t(1.0, 0.0);
    double step = 1e-3;
    int guard = 0;
    while (detail::pot(gd, t) > target) {
      detail::cd grad = 2.0 * std::conj(detail::pot_dz(gd, t));
      t -= step * grad / std::abs(grad);
      if (++guard > 200000) throw Error(ErrorCode::LevelCurveTraceFailed, "could not reach the level from +1");
    }
    for (int it = 0; it < 60; ++it) {
      double u = detail::pot(gd, t) - target;
      detail::cd grad = 2.0 * std::conj(detail::pot_dz(gd, t));
      t -= u * grad / std::norm(grad);
    }
    start = t;
  }
  auto tr = detail::trace_level(gd, lvl, start);
  if (detail::signed_area(tr.path) < 0) std::reverse(tr.path.begin(), tr.path.end());

  // smooth equal-sigma nodes on the level curve, anchored near +1
  auto project_d = [&](detail::cd t) {
    for (int it = 0; it < 30; ++it) {
      double u = detail::pot(gd, t) - lvl;
      detail::cd grad = 2.0 * std::conj(detail::pot_dz(gd, t));
      double g2 = std::norm(grad);
      if (g2 < 1e-28) break;
      t -= u * grad / g2;
      if (std::fabs(u) < 1e-14) break;
    }
    return t;
  };
  std::size_t m = 1024;
  auto nodes_d = detail::resample_sigma(tr.path, m, start);
  for (auto& t : nodes_d) t = project_d(t);
  nodes_d = detail::reparametrize_sigma(std::move(nodes_d), project_d, 3);

  // flux density rho(theta) = |grad u| |tau'(theta)| at high precision
  std::vector<detail::cd> cs(nodes_d);
  detail::fft_d(cs, false);
  for (auto& v : cs) v /= double(m);
  detail::truncate_lowpass(cs);
  SparseTrig series(cs, prec);
  // derivative series
  std::vector<detail::cd> dcs(cs);
  for (std::size_t j = 0; j < m; ++j) dcs[j] *= detail::cd(0.0, double(dft_freq(j, m)));
  SparseTrig dseries(dcs, prec);

  Real level_r(lvl, prec);
  auto tau_at = [&](const Real& th) {
    Cplx guess = series.eval(th);
    // polish onto the level set
    Real eps = curve.ctx.eps();
    Cplx tau = guess;
    for (int it = 0; it < 60; ++it) {
      Real u = level_potential(gens, tau) - level_r;
      Cplx grad = conj(level_potential_dz(gens, tau)) * 2.0;
      Real g2 = norm2(grad);
      if (g2.is_zero()) break;
      Cplx step = grad * (u / g2);
      tau -= step;
      if (abs(step) <= eps * (abs(tau) + 1.0) * 4.0) break;
    }
    return tau;
  };

  std::size_t fine = 2048;
  std::vector<Cplx> flux_samples(fine, Cplx(prec));
  for (std::size_t k = 0; k < fine; ++k) {
    Real th = Real::pi(prec) * (2.0 * double(k) / double(fine));
    Cplx tau = tau_at(th);
    Real density = abs(level_potential_dz(gens, tau)) * 2.0;
    Real speed = abs(dseries.eval(th));
    flux_samples[k] = Cplx(density * speed);
    if (!(flux_samples[k].re > 0.0))
      throw Error(ErrorCode::NonmonotoneFlux, "flux density is not positive along the level curve");
  }
  std::vector<Cplx> fc = dft_coeffs(flux_samples);
  Real total = fc[0].re * Real::pi(prec) * 2.0;

  auto cumflux = [&](const Real& th) {
    Real acc = fc[0].re * th;
    Cplx e = Cplx::polar(Real(1.0, prec), th);
    Cplx ei = conj(e);
    Cplx ep(1.0, 0.0, prec), em(1.0, 0.0, prec);
    Cplx one(1.0, 0.0, prec);
    for (std::size_t k = 1; k <= fine / 2; ++k) {
      ep = ep * e;
      em = em * ei;
      Cplx ik(0.0, double(k), prec);
      if (k < fine / 2)
        acc += ((fc[k] * (ep - one)) / ik - (fc[fine - k] * (em - one)) / ik).re;
      else
        acc += (-(fc[fine / 2] * (em - one)) / ik).re;
    }
    return acc;
  };
  auto fluxdens = [&](const Real& th) { return trig_eval(fc, th).re; };

  SchemeLevel out;
  out.n = n;
  std::size_t slots = 2 * std::size_t(n);
  for (std::size_t j = 0; j < slots; ++j) {
    Real target = total * ((double(j) + 0.5) / double(slots));
    Real th = Real::pi(prec) * (2.0 * (double(j) + 0.5) / double(slots));
    for (int it = 0; it < 60; ++it) {
      Real f = cumflux(th) - target;
      Real d = fluxdens(th);
      Real step = f / d;
      th -= step;
      if (abs(step).to_double() < 1e-40) break;
    }
    Cplx eps_j = tau_at(th);
    SchemePoint p;
    p.infinite = false;
    p.e = joukowski(eps_j);
    p.phi_e = inv(eps_j);  // the exterior preimage pairs with the interior one
    out.points.push_back(p);
  }
  out.v = scheme_detail::monic_from_points(out.points, prec);
  // total flux must equal 2 pi times the total generator mass
  double mass = 0;
  for (const auto& g : gens) mass += g.mult;
  if (std::fabs(total.to_double() - 2 * M_PI * mass) > 1e-8 * 2 * M_PI * mass)
    throw Error(ErrorCode::NonmonotoneFlux, "total flux does not match the generator mass");
  return out;
}

// Deterministic builder facade with a per-n cache.
class InterpolationScheme {
 public:
  enum class Kind { Repetition, EqualFlux, Classical };

  InterpolationScheme(Kind kind, std::shared_ptr<const ArcF> arc, std::vector<SchemeBasePoint> base,
                      Real rho, GeneratorSet gens = {})
      : kind_(kind), arc_(std::move(arc)), base_(std::move(base)), rho_(std::move(rho)), gens_(std::move(gens)) {}

  const SchemeLevel& level(int n) const {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    SchemeLevel lvl;
    switch (kind_) {
      case Kind::Repetition: lvl = generator_repetition_level(*arc_, base_, n); break;
      case Kind::Classical: lvl = classical_level(*arc_, n); break;
      case Kind::EqualFlux: lvl = equal_flux_level(*arc_, gens_, rho_, n); break;
    }
    return cache_.emplace(n, std::move(lvl)).first->second;
  }

  Kind kind() const { return kind_; }
  const ArcF& arc() const { return *arc_; }

 private:
  Kind kind_;
  std::shared_ptr<const ArcF> arc_;
  std::vector<SchemeBasePoint> base_;
  Real rho_;
  GeneratorSet gens_;
  mutable std::map<int, SchemeLevel> cache_;
};

// ---------------------------------------------------------------------------
// Symmetry diagnostics
// ---------------------------------------------------------------------------

struct SymmetryReport {
  double sup_abs_log_plus = 0;   // sup over samples of |log |r_n^+||
  double sup_abs_log_minus = 0;
  double sup_prod_defect = 0;    // sup |r^+ r^- - 1|
  std::vector<std::pair<Cplx, double>> probe_mods;
};

inline SymmetryReport symmetry_diagnostic(const SchemeLevel& level, const ArcF& arc,
                                          const std::vector<Cplx>& probes = {}) {
  SymmetryReport rep;
  mpfr_prec_t prec = arc.prec();
  Cplx one(1.0, 0.0, prec);
  for (std::size_t j = 1; j + 1 < arc.size(); ++j) {
    Cplx rp = level.rn_from_phi(arc.samples[j].tau_plus);
    Cplx rm = level.rn_from_phi(arc.samples[j].tau_minus);
    rep.sup_abs_log_plus = std::max(rep.sup_abs_log_plus, std::fabs(log(abs(rp)).to_double()));
    rep.sup_abs_log_minus = std::max(rep.sup_abs_log_minus, std::fabs(log(abs(rm)).to_double()));
    rep.sup_prod_defect = std::max(rep.sup_prod_defect, abs_d(rp * rm - one));
  }
  for (const auto& z : probes)
    rep.probe_mods.push_back({z, abs_d(level.rn_eval(z, *arc.curve))});
  return rep;
}

// ---------------------------------------------------------------------------
// Norm estimate of the outer Cauchy projection on L^2(Gamma) and the jump
// margin diagnostic for vanishing densities.
// ---------------------------------------------------------------------------

// Largest singular value of Q = (I - S)/2 on the discretized curve, computed
// in double precision; a diagnostic, floor-clamped at the known lower bound 1.
inline double qnorm_estimate(const GammaCurve& curve, int m = 8, int iters = 120) {
  using detail::cd;
  const auto& g = curve.grid(std::min(m, curve.base_level()));
  std::size_t n = g.tau.size();
  std::vector<cd> tau(n), dtau(n);
  for (std::size_t k = 0; k < n; ++k) {
    tau[k] = cd(g.tau[k].re.to_double(), g.tau[k].im.to_double());
    dtau[k] = cd(g.dtau[k].re.to_double(), g.dtau[k].im.to_double());
  }
  double h = 2 * M_PI / double(n);
  cd ipi(0, M_PI);
  // S phi (tau_j) = (1/pi i) PV int phi/(tau - tau_j); subtracted form with the
  // spectral differentiation matrix supplying the diagonal limit.
  std::vector<std::vector<cd>> S(n, std::vector<cd>(n, cd(0)));
  for (std::size_t j = 0; j < n; ++j) {
    cd diag_sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      cd b = h / ipi * dtau[k] / (tau[k] - tau[j]);
      S[j][k] += b;
      diag_sum -= b;
    }
    S[j][j] += diag_sum + 1.0;  // +phi_j from the PV of the kernel itself
    // diagonal limit of the subtracted integrand is phi'(theta_j); periodic
    // spectral differentiation D_{jk} = (-1)^{j-k}/2 cot((j-k)h/2)
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      long d = long(j) - long(k);
      double sgn = (d & 1) ? -1.0 : 1.0;
      double c = 0.5 * sgn / std::tan(0.5 * h * double(d));
      S[j][k] += h / ipi * c;
    }
  }
  // Q = (I - S)/2, weighted by the arclength measure w_k = |dtau_k| h
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = std::abs(dtau[k]) * h;
  auto applyQ = [&](const std::vector<cd>& x) {
    std::vector<cd> y(n, cd(0));
    for (std::size_t j = 0; j < n; ++j) {
      cd acc = x[j];
      for (std::size_t k = 0; k < n; ++k) acc -= S[j][k] * x[k];
      y[j] = 0.5 * acc;
    }
    return y;
  };
  auto applyQadj = [&](const std::vector<cd>& x) {
    std::vector<cd> y(n, cd(0));
    for (std::size_t k = 0; k < n; ++k) {
      cd acc = x[k] * w[k];
      for (std::size_t j = 0; j < n; ++j) acc -= std::conj(S[j][k]) * x[j] * w[j];
      y[k] = 0.5 * acc / w[k];
    }
    return y;
  };
  SplitMix64 rng(0xBEE5ull);
  std::vector<cd> x(n);
  for (auto& v : x) v = cd(rng.sym(), rng.sym());
  double est = 1.0;
  for (int it = 0; it < iters; ++it) {
    auto y = applyQadj(applyQ(x));
    double nrm = 0;
    for (std::size_t k = 0; k < n; ++k) nrm += std::norm(y[k]) * w[k];
    nrm = std::sqrt(nrm);
    if (nrm == 0) break;
    for (auto& v : y) v /= nrm;
    x = std::move(y);
    est = std::sqrt(nrm);
  }
  return std::max(est, 1.0);
}

struct UpsilonEntry {
  Cplx x;
  Real alpha;
  double lhs_plus = 0, lhs_minus = 0;  // measured jump of (scf r_n)^{+-} at x
  std::string verdict;                 // pass | fail | indeterminate
};

struct UpsilonReport {
  double qnorm_est = 1.0;
  bool segment_reduction = false;
  std::vector<UpsilonEntry> entries;
};

// Jump-margin diagnostic: for each density zero the measured one-sided jump of
// (scf_{hbar h} r_n)^{+-} at the largest available level, compared against
// 2/||Q||. The verdict is rigorous only through the segment reduction (where
// ||Q|| = 1 is attained and the condition reduces to 2 alpha < 1); otherwise
// an estimate-based comparison is reported as indeterminate.
inline UpsilonReport upsilon_margin(std::shared_ptr<const ArcF> arc, const SchemeLevel& level,
                                    const ArcDensity& h, const std::vector<Real>& h_breaks,
                                    const std::vector<HbarZeroSpec>& specs) {
  UpsilonReport rep;
  mpfr_prec_t prec = arc->prec();
  rep.qnorm_est = qnorm_estimate(*arc->curve);

  // segment reduction: segment arc, positive density, conjugate-symmetric scheme
  bool segment = arc->curve->kind == GammaCurve::Kind::Segment;
  bool positive = true;
  for (std::size_t j = 0; j < arc->size(); j += 8) {
    ArcPt pt{arc->samples[j].t, arc->samples[j].tau_plus, arc->samples[j].tau_minus};
    Cplx hv = h(pt);
    if (hv.re.sign() <= 0 || std::fabs(hv.im.to_double()) > 1e-12 * std::fabs(hv.re.to_double())) positive = false;
  }
  bool conj_sym = true;
  for (const auto& p : level.points) {
    if (p.infinite) continue;
    bool found = false;
    for (const auto& q : level.points) {
      if (q.infinite) continue;
      if (abs_d(conj(p.e) - q.e) < 1e-10) { found = true; break; }
    }
    if (!found) conj_sym = false;
  }
  rep.segment_reduction = segment && positive && conj_sym;

  HbarData hb = build_hbar(arc, specs);
  SzegoData sh = szego_function(*arc, h, h_breaks);
  SzegoData w = szego_product(szego_of_hbar(hb), sh);

  for (const auto& z : hb.zeros) {
    UpsilonEntry e;
    e.x = z.x;
    e.alpha = z.alpha_eff;
    double pos = z.sample_pos;
    auto val_p = [&](std::size_t j) {
      return (w.bplus[j] / w.bminus[j]) * level.rn_from_phi(arc->samples[j].tau_plus);
    };
    auto val_m = [&](std::size_t j) {
      return (w.bminus[j] / w.bplus[j]) * level.rn_from_phi(arc->samples[j].tau_minus);
    };
    auto limit = [&](auto f, bool left) {
      long j1 = left ? long(std::floor(pos)) : long(std::ceil(pos));
      long j2 = left ? j1 - 1 : j1 + 1;
      if (double(j1) == pos) { j1 += left ? -1 : 1; j2 += left ? -1 : 1; }
      j1 = std::min<long>(std::max<long>(j1, 0), long(arc->size() - 1));
      j2 = std::min<long>(std::max<long>(j2, 0), long(arc->size() - 1));
      Cplx f1 = f(std::size_t(j1)), f2 = f(std::size_t(j2));
      if (j1 == j2) return f1;
      Real t((pos - double(j1)) / double(j1 - j2), prec);
      return f1 + (f1 - f2) * t;
    };
    e.lhs_plus = abs(limit(val_p, false) - limit(val_p, true)).to_double();
    e.lhs_minus = abs(limit(val_m, false) - limit(val_m, true)).to_double();
    double lhs = std::max(e.lhs_plus, e.lhs_minus);
    if (rep.segment_reduction) {
      double a2 = 2.0 * z.alpha_eff.to_double();
      e.verdict = a2 < 1.0 - 1e-12 ? "pass" : (a2 > 1.0 + 1e-12 ? "fail" : "indeterminate");
    } else if (lhs >= 2.0) {
      e.verdict = "fail";  // violates the condition even at the attained lower bound
    } else if (lhs < 2.0 / rep.qnorm_est) {
      e.verdict = "indeterminate";  // passes only through the norm estimate
    } else {
      e.verdict = "indeterminate";
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace arcpade
