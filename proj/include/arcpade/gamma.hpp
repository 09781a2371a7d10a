#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "arcpade/complex.hpp"
#include "arcpade/fft.hpp"

namespace arcpade {

// Joukowski map J(tau) = (tau + 1/tau)/2.
inline Cplx joukowski(const Cplx& tau) {
  if (tau.is_zero()) throw Error(ErrorCode::DomainError, "joukowski at tau = 0");
  return (tau + inv(tau)) * 0.5;
}

// One generator of the level potential: a zero of (tau - eps)/(1 - eps*tau)
// with integer weight.
struct Generator {
  Cplx eps;
  int mult = 1;
};

using GeneratorSet = std::vector<Generator>;

// u(tau) = sum m * log|(tau - eps)/(1 - eps tau)|. Antisymmetric under
// inversion: u(1/tau) = -u(tau), and u(+-1) = 0.
inline Real level_potential(const GeneratorSet& g, const Cplx& tau) {
  mpfr_prec_t prec = tau.prec();
  Real u(prec);
  for (const auto& gen : g) {
    Cplx num = tau - gen.eps;
    Cplx den = Cplx(1.0, 0.0, prec) - gen.eps * tau;
    if (num.is_zero() || den.is_zero())
      throw Error(ErrorCode::PoleError, "level potential evaluated at a generator point");
    u += (log(abs(num)) - log(abs(den))) * double(gen.mult);
  }
  return u;
}

// Complex derivative d/dtau of sum m log((tau-eps)/(1-eps tau)); the gradient
// of u is 2*conj of this.
inline Cplx level_potential_dz(const GeneratorSet& g, const Cplx& tau) {
  mpfr_prec_t prec = tau.prec();
  Cplx s(prec);
  Cplx one(1.0, 0.0, prec);
  for (const auto& gen : g)
    s += (inv(tau - gen.eps) + gen.eps / (one - gen.eps * tau)) * (0.5 * double(gen.mult));
  return s;
}

namespace detail {

using cd = std::complex<double>;

struct GenD {
  cd eps;
  int mult;
};

inline std::vector<GenD> to_double(const GeneratorSet& g) {
  std::vector<GenD> out;
  for (const auto& gen : g) out.push_back({cd(gen.eps.re.to_double(), gen.eps.im.to_double()), gen.mult});
  return out;
}

inline double pot(const std::vector<GenD>& g, cd tau) {
  double u = 0;
  for (const auto& gen : g)
    u += gen.mult * (std::log(std::abs(tau - gen.eps)) - std::log(std::abs(1.0 - gen.eps * tau)));
  return u;
}

inline cd pot_dz(const std::vector<GenD>& g, cd tau) {
  cd s = 0;
  for (const auto& gen : g)
    s += 0.5 * double(gen.mult) * (1.0 / (tau - gen.eps) + gen.eps / (1.0 - gen.eps * tau));
  return s;
}

struct TraceResult {
  std::vector<cd> path;      // closed polyline (last point not repeated)
  double closure = 0;        // gap |last step endpoint - start|
  double min_dist_m1 = 1e9;  // distance of path to -1
};

// Predictor-corrector continuation of {u = level} from a start point on it.
inline TraceResult trace_level(const std::vector<GenD>& g, double level, cd start, double h0 = 1e-2,
                               int max_steps = 400000) {
  TraceResult out;
  auto newton = [&](cd t, int iters, bool& ok) {
    ok = false;
    for (int k = 0; k < iters; ++k) {
      double u = pot(g, t) - level;
      cd grad = 2.0 * std::conj(pot_dz(g, t));
      double g2 = std::norm(grad);
      if (g2 < 1e-28) return t;
      t -= u * grad / g2;
      if (std::abs(pot(g, t) - level) < 1e-14) { ok = true; return t; }
    }
    ok = std::abs(pot(g, t) - level) < 1e-12;
    return t;
  };

  bool ok = false;
  cd tau = newton(start, 12, ok);
  if (!ok) throw Error(ErrorCode::LevelCurveTraceFailed, "start point does not lie on the level set");

  auto tangent = [&](cd t) {
    cd grad = 2.0 * std::conj(pot_dz(g, t));
    double m = std::abs(grad);
    if (m < 1e-14) throw Error(ErrorCode::TraceDiverged, "vanishing gradient on level set");
    return cd(0, 1) * grad / m;
  };

  double h = h0;
  out.path.push_back(tau);
  double arclen = 0;
  cd first = tau;
  for (int step = 0; step < max_steps; ++step) {
    for (const auto& gen : g) {
      if (std::abs(tau - gen.eps) < 1e-7 || std::abs(tau * gen.eps - 1.0) < 1e-7 * std::abs(gen.eps))
        throw Error(ErrorCode::HitGenerator, "trace ran into a generator");
    }
    cd k1 = tangent(tau);
    cd k2 = tangent(tau + h * k1);
    cd pred = tau + 0.5 * h * (k1 + k2);
    bool cok = false;
    cd corr = newton(pred, 8, cok);
    double corr_mag = std::abs(corr - pred);
    if (!cok || corr_mag > 0.1 * h) {
      h *= 0.5;
      if (h < 1e-12) throw Error(ErrorCode::TraceDiverged, "step control collapsed");
      continue;
    }
    arclen += std::abs(corr - tau);
    tau = corr;
    out.path.push_back(tau);
    out.min_dist_m1 = std::min(out.min_dist_m1, std::abs(tau + 1.0));
    if (corr_mag < 0.02 * h) h = std::min(h * 1.25, 2.0 * h0);
    if (arclen > 10 * h0 && std::abs(tau - first) < 1.5 * h) {
      out.closure = std::abs(tau - first);
      out.path.pop_back();  // avoid a duplicate of the start
      return out;
    }
  }
  throw Error(ErrorCode::NotClosed, "path did not return to start");
}

inline double signed_area(const std::vector<cd>& p) {
  double a = 0;
  std::size_t n = p.size();
  for (std::size_t k = 0; k < n; ++k) {
    const cd& u = p[k];
    const cd& v = p[(k + 1) % n];
    a += u.real() * v.imag() - v.real() * u.imag();
  }
  return 0.5 * a;
}

inline bool segments_intersect(cd a, cd b, cd c, cd d) {
  auto cross = [](cd u, cd v) { return u.real() * v.imag() - u.imag() * v.real(); };
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

inline void check_self_intersection(const std::vector<cd>& p) {
  std::vector<cd> q;
  std::size_t stride = std::max<std::size_t>(1, p.size() / 1500);
  for (std::size_t k = 0; k < p.size(); k += stride) q.push_back(p[k]);
  std::size_t n = q.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      if (i == 0 && j + 2 == n) continue;
      if (segments_intersect(q[i], q[i + 1], q[j], q[j + 1]))
        throw Error(ErrorCode::SelfIntersection, "traced level set intersects itself");
    }
}

inline int winding_number(const std::vector<cd>& poly, cd z) {
  double total = 0;
  std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    cd a = poly[k] - z, b = poly[(k + 1) % n] - z;
    total += std::arg(b / a);
  }
  return int(std::lround(total / (2 * M_PI)));
}

inline void fft_d(std::vector<cd>& a, bool inverse) {
  std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2 * M_PI / double(len) * (inverse ? 1 : -1);
    cd wl = std::polar(1.0, ang);
    for (std::size_t i = 0; i < n; i += len) {
      cd w = 1;
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= double(n);
}

inline cd trig_eval_d(const std::vector<cd>& c, double theta) {
  std::size_t n = c.size();
  cd e = std::polar(1.0, theta), ei = std::conj(e);
  cd ep = 1, em = 1, sum = c.empty() ? cd(0) : c[0];
  for (std::size_t k = 1; k <= n / 2; ++k) {
    ep *= e;
    em *= ei;
    if (k < n / 2) sum += c[k] * ep + c[n - k] * em;
    else sum += c[n / 2] * em;
  }
  return sum;
}

inline cd trig_deriv_d(const std::vector<cd>& c, double theta) {
  std::size_t n = c.size();
  cd e = std::polar(1.0, theta), ei = std::conj(e);
  cd ep = 1, em = 1, sum = 0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    ep *= e;
    em *= ei;
    cd ik(0, double(k));
    if (k < n / 2) sum += c[k] * ep * ik - c[n - k] * em * ik;
    else sum += c[n / 2] * em * (-ik);
  }
  return sum;
}

// Closed polyline -> samples roughly equispaced in d sigma = |d tau|/|tau|,
// anchored so sample 0 sits at the polyline point nearest `anchor`.
inline std::vector<cd> resample_sigma(const std::vector<cd>& path, std::size_t count, cd anchor) {
  std::size_t n = path.size();
  std::size_t a0 = 0;
  double best = 1e18;
  for (std::size_t k = 0; k < n; ++k) {
    double d = std::abs(path[k] - anchor);
    if (d < best) {
      best = d;
      a0 = k;
    }
  }
  std::vector<cd> p;
  p.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) p.push_back(path[(a0 + k) % n]);
  p.push_back(p.front());
  std::vector<double> s(p.size(), 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) {
    cd mid = 0.5 * (p[k] + p[k - 1]);
    s[k] = s[k - 1] + std::abs(p[k] - p[k - 1]) / std::abs(mid);
  }
  double total = s.back();
  std::vector<cd> out(count);
  std::size_t j = 1;
  for (std::size_t k = 0; k < count; ++k) {
    double target = total * double(k) / double(count);
    while (j < s.size() - 1 && s[j] < target) ++j;
    double t = (target - s[j - 1]) / std::max(1e-300, s[j] - s[j - 1]);
    out[k] = p[j - 1] + t * (p[j] - p[j - 1]);
  }
  return out;
}

// Zero every coefficient below the double-precision noise floor so a frozen
// series stays a genuinely low-degree trigonometric polynomial.
inline void truncate_noise(std::vector<cd>& c, double rel = 1e-13) {
  double m = 0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  for (auto& v : c)
    if (std::abs(v) < rel * m) v = 0;
}

// Zero everything above the first octave whose band maximum falls below
// rel * global max: double-precision pipelines leave broadband artifacts well
// above the amplitude floor, and a frozen fit must not carry them.
inline void truncate_lowpass(std::vector<cd>& c, double rel = 1e-12) {
  std::size_t n = c.size();
  double gmax = 0;
  for (const auto& v : c) gmax = std::max(gmax, std::abs(v));
  std::size_t kcut = n / 2;
  double prev = gmax;
  for (std::size_t lo = 2; lo < n / 2; lo *= 2) {
    std::size_t hi = std::min(2 * lo, n / 2);
    double bmax = 0;
    for (std::size_t k = lo; k < hi; ++k) bmax = std::max({bmax, std::abs(c[k]), std::abs(c[n - k])});
    // cut where the spectrum reaches the target floor or visibly stalls on a
    // noise plateau left by double-precision preprocessing
    if (bmax < rel * gmax || (bmax > 0.25 * prev && bmax < 1e-4 * gmax)) {
      kcut = lo;
      break;
    }
    prev = bmax;
  }
  for (std::size_t j = 0; j < n; ++j) {
    long f = dft_freq(j, n);
    if (std::size_t(f < 0 ? -f : f) >= kcut) c[j] = 0;
  }
}

// Project DFT coefficients onto the odd structure c_{-k} = -c_k (c_0 = 0).
// Frozen parametrization maps with this structure keep the half-plus-mirror
// node construction free of seams at theta = 0, pi.
inline void enforce_odd(std::vector<cd>& c) {
  std::size_t n = c.size();
  c[0] = 0;
  c[n / 2] = 0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    cd v = 0.5 * (c[k] - c[n - k]);
    c[k] = v;
    c[n - k] = -v;
  }
}

// One spectral pass towards the equal-sigma parametrization: for a closed node
// set sampled uniformly in its own parameter, return the angles theta*_j at
// which sigma(theta*) = j/n of the total, i.e. the reparametrization map
// evaluated on the uniform grid.
inline std::vector<double> sigma_reparam_angles(const std::vector<cd>& nodes) {
  std::size_t n = nodes.size();
  std::vector<cd> c(nodes);
  fft_d(c, false);
  for (auto& v : c) v /= double(n);
  // spectral coefficients of sigma'(theta) = |tau'| / |tau|
  std::vector<cd> sp(n);
  for (std::size_t k = 0; k < n; ++k) {
    double th = 2 * M_PI * double(k) / double(n);
    sp[k] = cd(std::abs(trig_deriv_d(c, th)) / std::abs(trig_eval_d(c, th)), 0.0);
  }
  std::vector<cd> sc(sp);
  fft_d(sc, false);
  for (auto& v : sc) v /= double(n);
  truncate_noise(sc);
  double mean = sc[0].real();
  auto sigma = [&](double th) {
    // antiderivative with sigma(0) = 0
    cd e = std::polar(1.0, th), ei = std::conj(e);
    cd ep = 1, em = 1;
    double acc = mean * th;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      ep *= e;
      em *= ei;
      cd ik(0, double(k));
      if (k < n / 2) acc += ((sc[k] * (ep - 1.0)) / ik - (sc[n - k] * (em - 1.0)) / ik).real();
      else acc += (-(sc[n / 2] * (em - 1.0)) / ik).real();
    }
    return acc;
  };
  auto sigma_d = [&](double th) { return trig_eval_d(sc, th).real(); };
  double total = 2 * M_PI * mean;
  std::vector<double> out(n);
  out[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double target = total * double(k) / double(n);
    double th = 2 * M_PI * double(k) / double(n);
    for (int it = 0; it < 40; ++it) {
      double f = sigma(th) - target;
      double d = sigma_d(th);
      double step = f / d;
      th -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    out[k] = th;
  }
  return out;
}

// A few rounds of spectral reparametrization towards the equal-sigma
// parametrization. Each round low-passes the node series before resampling
// and projects back onto the curve, so broadband parameter jitter inherited
// from the polyline dies quadratically per round.
inline std::vector<cd> reparametrize_sigma(std::vector<cd> nodes, const std::function<cd(cd)>& project,
                                           int rounds) {
  std::size_t n = nodes.size();
  for (int r = 0; r < rounds; ++r) {
    std::vector<cd> c(nodes);
    fft_d(c, false);
    for (auto& v : c) v /= double(n);
    truncate_lowpass(c);
    std::vector<cd> smooth(n);
    for (std::size_t k = 0; k < n; ++k) smooth[k] = trig_eval_d(c, 2 * M_PI * double(k) / double(n));
    auto angles = sigma_reparam_angles(smooth);
    std::vector<cd> next(n);
    for (std::size_t k = 0; k < n; ++k) next[k] = project(trig_eval_d(c, angles[k]));
    nodes = std::move(next);
  }
  return nodes;
}

}  // namespace detail

// Frozen trigonometric polynomial with few active terms, held at working
// precision. Coefficients come from double-precision fits; evaluation is done
// in extended precision so the represented function is exactly analytic.
class SparseTrig {
 public:
  SparseTrig() = default;
  SparseTrig(const std::vector<detail::cd>& dense, mpfr_prec_t prec) {
    std::size_t n = dense.size();
    for (std::size_t j = 0; j < n; ++j) {
      if (dense[j] == detail::cd(0.0, 0.0)) continue;
      long f = dft_freq(j, n);
      terms_.push_back({f, Cplx(dense[j].real(), dense[j].imag(), prec)});
      kmax_ = std::max(kmax_, f < 0 ? -f : f);
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return std::abs(a.freq) < std::abs(b.freq); });
  }

  bool empty() const { return terms_.empty(); }

  Cplx eval(const Real& theta) const {
    mpfr_prec_t prec = theta.prec();
    Cplx sum(prec);
    if (terms_.empty()) return sum;
    Cplx e = Cplx::polar(Real(1.0, prec), theta);
    Cplx ei = conj(e);
    Cplx ep(1.0, 0.0, prec), em(1.0, 0.0, prec);
    std::size_t idx = 0;
    for (long k = 0; k <= kmax_ && idx < terms_.size(); ++k) {
      while (idx < terms_.size() && std::abs(terms_[idx].freq) == k) {
        const auto& t = terms_[idx];
        if (t.freq == 0) sum += t.coeff;
        else if (t.freq > 0) sum += t.coeff * ep;
        else sum += t.coeff * em;
        ++idx;
      }
      ep = ep * e;
      em = em * ei;
    }
    return sum;
  }

 private:
  struct Term {
    long freq;
    Cplx coeff;
  };
  std::vector<Term> terms_;
  long kmax_ = 0;
};

struct CurveReport {
  double closure_residual = 0;
  double symmetry_residual = 0;
  double level_residual = 0;
  double endpoint_dist_p1 = 0;
  double endpoint_dist_m1 = 0;
  double fourier_tail = 0;
  std::size_t node_count = 0;
};

// Closed analytic Jordan curve Gamma in the tau plane, the Joukowski preimage
// of the arc. Stored as a trigonometric parametrization with 2^m equispaced
// theta nodes, counter-clockwise, anchored tau(0) = 1 and inversion-symmetric:
// tau(2pi - theta) = 1/tau(theta), so node k pairs with node N-k.
class GammaCurve {
 public:
  enum class Kind { Segment, Parametrized, Generated, Imported };

  struct Grid {
    std::vector<Cplx> tau;   // 2^m nodes
    std::vector<Cplx> dtau;  // derivative d tau/d theta at nodes
    std::vector<Cplx> coeffs;
  };

  PrecisionContext ctx;
  Kind kind = Kind::Segment;
  GeneratorSet gens;                                  // Generated
  std::function<Cplx(const Real&)> pmap;              // Parametrized: x in [-1,1] -> F
  std::function<Cplx(const Real&)> pmap_d;            // derivative of pmap
  int base_m = 9;
  CurveReport report;

  static constexpr int kMaxM = 14;

  // --- constructors ------------------------------------------------------

  static std::shared_ptr<GammaCurve> segment(const PrecisionContext& ctx, int m = 9) {
    auto c = std::make_shared<GammaCurve>();
    c->ctx = ctx;
    c->kind = Kind::Segment;
    c->gens = {Generator{Cplx(0.0, 0.0, ctx.bits), 1}};
    c->base_m = m;
    c->finalize_base();
    return c;
  }

  static std::shared_ptr<GammaCurve> from_parametrization(const PrecisionContext& ctx,
                                                          std::function<Cplx(const Real&)> p,
                                                          std::function<Cplx(const Real&)> dp, int m = 9) {
    auto c = std::make_shared<GammaCurve>();
    c->ctx = ctx;
    c->kind = Kind::Parametrized;
    c->pmap = std::move(p);
    c->pmap_d = std::move(dp);
    c->base_m = m;
    // endpoints must map to themselves
    Cplx p1 = c->pmap(ctx.R(1.0));
    Cplx m1 = c->pmap(ctx.R(-1.0));
    if (abs_d(p1 - Cplx(1.0, 0.0, ctx.bits)) > 1e-12 || abs_d(m1 - Cplx(-1.0, 0.0, ctx.bits)) > 1e-12)
      throw Error(ErrorCode::DomainError, "parametrization must fix the endpoints +-1");
    c->finalize_base();
    return c;
  }

  static std::shared_ptr<GammaCurve> traced(const PrecisionContext& ctx, GeneratorSet gens, int m = 9) {
    auto c = std::make_shared<GammaCurve>();
    c->ctx = ctx;
    c->kind = Kind::Generated;
    c->gens = normalize_generators(std::move(gens), ctx);
    c->base_m = m;
    c->run_trace();
    c->finalize_base();
    return c;
  }

  static std::shared_ptr<GammaCurve> imported(const PrecisionContext& ctx, std::vector<Cplx> nodes,
                                              GeneratorSet gens = {}) {
    auto c = std::make_shared<GammaCurve>();
    c->ctx = ctx;
    c->gens = std::move(gens);
    c->kind = c->gens.empty() ? Kind::Imported : Kind::Generated;
    std::size_t n = nodes.size();
    if (n < 8 || (n & (n - 1)) != 0)
      throw Error(ErrorCode::InvalidCurve, "imported curve needs a power-of-two node count >= 8");
    int m = 0;
    while ((std::size_t(1) << m) < n) ++m;
    c->base_m = m;
    c->imported_nodes_ = std::move(nodes);
    c->finalize_base();
    return c;
  }

  // --- node access --------------------------------------------------------

  const Grid& grid(int m) const {
    auto it = grids_.find(m);
    if (it != grids_.end()) return *it->second;
    if (m > kMaxM) throw Error(ErrorCode::NotStabilized, "grid resolution cap reached");
    auto g = std::make_shared<Grid>(build_grid(m));
    grids_[m] = g;
    return *g;
  }

  int base_level() const { return base_m; }
  std::size_t base_size() const { return std::size_t(1) << base_m; }

  Cplx tau_node(int m, std::size_t k) const { return grid(m).tau[k]; }

  // Parametrization value at arbitrary theta (exact curve point for segment,
  // parametrized and generated kinds; series value for imported curves).
  Cplx tau_at(const Real& theta) const {
    mpfr_prec_t prec = ctx.bits;
    switch (kind) {
      case Kind::Segment:
        return Cplx::polar(Real(1.0, prec), theta);
      case Kind::Parametrized: {
        Cplx guess = trig_eval(grid(base_m).coeffs, theta);
        Real th = theta;
        if (!reparam_series_.empty()) th += reparam_series_.eval(theta).re;
        return preimage_near(pmap(cos(th)), guess);
      }
      case Kind::Generated: {
        Cplx guess = trig_eval(grid(base_m).coeffs, theta);
        return polish(guess, Real(0.0, prec));
      }
      case Kind::Imported:
        return trig_eval(grid(base_m).coeffs, theta);
    }
    throw Error(ErrorCode::InvalidCurve, "unreachable");
  }

  Cplx dtau_at(const Real& theta) const { return trig_eval_derivative(grid(base_m).coeffs, theta); }

  // --- geometry helpers ----------------------------------------------------

  double diameter() const {
    const auto& g = grid(base_m);
    double lo_re = 1e18, hi_re = -1e18, lo_im = 1e18, hi_im = -1e18;
    for (const auto& t : g.tau) {
      lo_re = std::min(lo_re, t.re.to_double());
      hi_re = std::max(hi_re, t.re.to_double());
      lo_im = std::min(lo_im, t.im.to_double());
      hi_im = std::max(hi_im, t.im.to_double());
    }
    return std::hypot(hi_re - lo_re, hi_im - lo_im);
  }

  int winding(const Cplx& z) const {
    return detail::winding_number(poly_, detail::cd(z.re.to_double(), z.im.to_double()));
  }

  double dist_to_nodes(const Cplx& z) const {
    detail::cd zz(z.re.to_double(), z.im.to_double());
    double best = 1e18;
    for (const auto& t : poly_) best = std::min(best, std::abs(t - zz));
    return best;
  }

  // Newton projection onto {u = level} along the gradient (generated curves).
  Cplx polish(Cplx tau, const Real& level) const {
    Real eps = ctx.eps();
    for (int it = 0; it < 60; ++it) {
      Real u = level_potential(gens, tau) - level;
      Cplx grad = conj(level_potential_dz(gens, tau)) * 2.0;
      Real g2 = norm2(grad);
      if (g2.is_zero()) break;
      Cplx step = grad * (u / g2);
      tau -= step;
      if (abs(step) <= eps * (abs(tau) + 1.0) * 4.0) break;
    }
    return tau;
  }

  // Joukowski preimage of x closest to the guess.
  static Cplx preimage_near(const Cplx& x, const Cplx& guess) {
    Cplx r = sqrt(x * x - Cplx(1.0, 0.0, x.prec()));
    Cplx a = x + r, b = x - r;
    return abs(a - guess) < abs(b - guess) ? a : b;
  }

 private:
  mutable std::map<int, std::shared_ptr<const Grid>> grids_;
  std::vector<detail::cd> poly_;     // double polyline for winding/distance tests
  std::vector<Cplx> imported_nodes_; // only for imported curves

  // Pre-trace canonicalization: take the preimage with |eps| <= 1 for each
  // generator; the final inside/outside verification happens after tracing.
  static GeneratorSet normalize_generators(GeneratorSet g, const PrecisionContext&) {
    for (auto& gen : g)
      if (abs(gen.eps) > 1.0) gen.eps = inv(gen.eps);
    return g;
  }

  void run_trace() {
    auto gd = detail::to_double(gens);
    for (int attempt = 0; attempt < 2; ++attempt) {
      auto tr = detail::trace_level(gd, 0.0, detail::cd(1.0, 0.0));
      if (tr.min_dist_m1 > 0.05)
        throw Error(ErrorCode::InvalidCurve, "level-set component through +1 does not pass through -1");
      if (detail::signed_area(tr.path) < 0) {
        std::reverse(tr.path.begin(), tr.path.end());
      }
      detail::check_self_intersection(tr.path);
      // all-interior convention for generators
      bool consistent = true;
      for (auto& gen : gens) {
        detail::cd e(gen.eps.re.to_double(), gen.eps.im.to_double());
        if (detail::winding_number(tr.path, e) == 0) {
          gen.eps = inv(gen.eps);
          consistent = false;
        }
      }
      if (consistent) {
        poly_ = std::move(tr.path);
        report.closure_residual = tr.closure;
        report.endpoint_dist_m1 = tr.min_dist_m1;
        double sym = 0;
        std::size_t stride = std::max<std::size_t>(1, poly_.size() / 512);
        for (std::size_t k = 0; k < poly_.size(); k += stride) {
          detail::cd invk = 1.0 / poly_[k];
          double best = 1e18;
          for (const auto& q : poly_) best = std::min(best, std::abs(q - invk));
          sym = std::max(sym, best);
        }
        report.symmetry_residual = sym;
        if (detail::winding_number(poly_, detail::cd(0, 0)) != 1)
          throw Error(ErrorCode::InvalidCurve, "curve does not enclose the origin once");
        return;
      }
      gd = detail::to_double(gens);
    }
    throw Error(ErrorCode::InvalidCurve, "generator preimages could not be made interior-consistent");
  }

  // Build the canonical base grid for this curve: half the nodes computed,
  // the other half mirrored through tau -> 1/tau, endpoints pinned exactly.
  void finalize_base() {
    double tail = 1.0;
    for (int m = base_m; m <= kMaxM; ++m) {
      Grid g = build_grid(m);
      tail = spectral_tail(g.coeffs);
      base_m = m;
      grids_.clear();
      grids_[m] = std::make_shared<Grid>(std::move(g));
      if (kind == Kind::Imported) break;  // fixed node set, tail is informational
      double target = fit_tail_target();
      if (tail <= target) break;
      if (m == kMaxM)
        throw Error(ErrorCode::InvalidCurve,
                    "trigonometric fit tail did not reach target at maximum resolution");
    }
    report.fourier_tail = tail;
    report.node_count = base_size();
    const auto& g = grid(base_m);
    if (poly_.empty()) {
      poly_.reserve(g.tau.size());
      for (const auto& t : g.tau) poly_.push_back(detail::cd(t.re.to_double(), t.im.to_double()));
    }
    report.endpoint_dist_p1 = 0.0;  // pinned
    report.endpoint_dist_m1 = 0.0;
    // residual of the defining level set at the nodes
    if (kind == Kind::Generated || kind == Kind::Segment) {
      double lr = 0;
      for (std::size_t k = 0; k < g.tau.size(); k += std::max<std::size_t>(1, g.tau.size() / 64))
        lr = std::max(lr, std::fabs(level_potential(gens, g.tau[k]).to_double()));
      report.level_residual = lr;
    }
  }

  double fit_tail_target() const {
    // keep the parametrization error well below the quadrature tolerances
    return std::max(1e-3 * std::pow(10.0, ctx.default_tol_exp10), 1e-40);
  }

  Grid build_grid(int m) const {
    std::size_t n = std::size_t(1) << m;
    mpfr_prec_t prec = ctx.bits;
    std::vector<Cplx> tau(n, Cplx(prec));
    Real two_pi = Real::pi(prec) * 2.0;
    switch (kind) {
      case Kind::Segment: {
        for (std::size_t k = 0; k <= n / 2; ++k) {
          Real th = two_pi * (double(k) / double(n));
          tau[k] = Cplx::polar(Real(1.0, prec), th);
        }
        break;
      }
      case Kind::Parametrized: {
        build_parametrized_half(tau, n);
        break;
      }
      case Kind::Generated: {
        for (std::size_t k = 0; k <= n / 2; ++k) {
          Real th = two_pi * (double(k) / double(n));
          Cplx guess = seed_guess(th, m);
          tau[k] = polish(guess, Real(0.0, prec));
        }
        break;
      }
      case Kind::Imported: {
        if ((std::size_t(1) << m) != imported_nodes_.size())
          throw Error(ErrorCode::NotStabilized, "imported curve cannot be refined beyond its node set");
        Grid g;
        g.tau = imported_nodes_;
        g.coeffs = dft_coeffs(g.tau);
        g.dtau.reserve(imported_nodes_.size());
        auto d = g.coeffs;
        Cplx iu = Cplx::i_unit(prec);
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = d[j] * (iu * double(dft_freq(j, d.size())));
        fft_pow2(d, true);
        g.dtau = std::move(d);
        return g;
      }
    }
    // exact endpoint pins and inversion-symmetric mirror
    tau[0] = Cplx(1.0, 0.0, prec);
    tau[n / 2] = Cplx(-1.0, 0.0, prec);
    for (std::size_t k = 1; k < n / 2; ++k) tau[n - k] = inv(tau[k]);

    Grid g;
    g.tau = std::move(tau);
    g.coeffs = dft_coeffs(g.tau);
    std::vector<Cplx> d = g.coeffs;
    Cplx iu = Cplx::i_unit(prec);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = d[j] * (iu * double(dft_freq(j, n)));
    fft_pow2(d, true);
    // enforce the mirrored derivative identity dtau(2pi-th) = dtau(th)/tau(th)^2
    for (std::size_t k = 1; k < n / 2; ++k) d[n - k] = d[k] / (g.tau[k] * g.tau[k]);
    g.dtau = std::move(d);
    return g;
  }

  // Seed for generated-curve node polish: base series if available, else the
  // double-precision reparametrized polyline.
  // Reference parametrization for generated curves, stored in log form
  // tau0(theta) = exp(i theta + M(theta)) with M an odd trigonometric
  // polynomial, so the half-plus-mirror sampling has no seams and the
  // endpoint pins tau0(0) = 1, tau0(pi) = -1 hold exactly.
  Cplx seed_guess(const Real& th, int m) const {
    if (!grids_.empty()) return trig_eval(grids_.begin()->second->coeffs, th);
    if (log_seed_.empty()) build_seed_series(std::max(std::size_t(256), std::size_t(1) << std::min(m, 10)));
    Cplx L = log_seed_.eval(th);
    return exp(Cplx(L.re, L.im + th));
  }

  void build_seed_series(std::size_t n) const {
    auto gd = detail::to_double(gens);
    auto project = [&](detail::cd t) {
      for (int k = 0; k < 20; ++k) {
        double u = detail::pot(gd, t);
        detail::cd grad = 2.0 * std::conj(detail::pot_dz(gd, t));
        double g2 = std::norm(grad);
        if (g2 < 1e-28) break;
        t -= u * grad / g2;
        if (std::fabs(u) < 1e-14) break;
      }
      return t;
    };
    std::vector<detail::cd> nodes = detail::resample_sigma(poly_, n, detail::cd(1.0, 0.0));
    for (auto& t : nodes) t = project(t);
    nodes = detail::reparametrize_sigma(std::move(nodes), project, 4);
    std::size_t a0 = 0;
    double best = 1e18;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      double d = std::abs(nodes[k] - detail::cd(1.0, 0.0));
      if (d < best) { best = d; a0 = k; }
    }
    std::rotate(nodes.begin(), nodes.begin() + long(a0), nodes.end());
    // log form: M(theta_k) = log(tau_k) - i theta_k, unwrapped along the loop
    std::vector<detail::cd> M(nodes.size());
    double prev_arg = std::arg(nodes[0]);
    double acc = prev_arg;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      double a = std::arg(nodes[k]);
      double d = a - prev_arg;
      while (d > M_PI) d -= 2 * M_PI;
      while (d < -M_PI) d += 2 * M_PI;
      if (k > 0) acc += d;
      prev_arg = a;
      M[k] = detail::cd(std::log(std::abs(nodes[k])), acc - 2 * M_PI * double(k) / double(nodes.size()));
    }
    detail::fft_d(M, false);
    for (auto& v : M) v /= double(M.size());
    detail::enforce_odd(M);
    detail::truncate_lowpass(M);
    log_seed_ = SparseTrig(M, ctx.bits);
  }

  // Branch-continued preimage walk of theta -> p(cos theta*) over half the
  // circle. theta*(s) applies the frozen equal-sigma reparametrization so that
  // parametrized and traced curves share one canonical parametrization.
  void walk_preimages(std::vector<Cplx>& tau, std::size_t n, const Cplx& seed, bool reparam) const {
    mpfr_prec_t prec = ctx.bits;
    Real two_pi = Real::pi(prec) * 2.0;
    tau[0] = Cplx(1.0, 0.0, prec);
    Cplx prev = tau[0];
    for (std::size_t k = 1; k <= n / 2; ++k) {
      Real s = two_pi * (double(k) / double(n));
      Real th = s;
      if (reparam && !reparam_series_.empty()) th += reparam_series_.eval(s).re;
      Cplx x = pmap(cos(th));
      Cplx guess = (k == 1) ? prev + seed * (two_pi / double(n)) : prev + (prev - tau[k - 2]);
      Cplx r = sqrt(x * x - Cplx(1.0, 0.0, prec));
      Cplx a = x + r, b = x - r;
      Real da = abs(a - guess), db = abs(b - guess);
      Cplx pick = da < db ? a : b;
      Real sep = abs(a - b);
      if (k > 1 && min(da, db) > sep * 0.45 && sep.to_double() > 1e-12)
        throw Error(ErrorCode::BranchJump, "preimage branch selection ambiguous; increase resolution");
      tau[k] = pick;
      prev = pick;
    }
    if (abs_d(tau[n / 2] + Cplx(1.0, 0.0, prec)) > 1e-8)
      throw Error(ErrorCode::BranchJump, "preimage path did not land on -1 at theta = pi");
  }

  void build_parametrized_half(std::vector<Cplx>& tau, std::size_t n) const {
    mpfr_prec_t prec = ctx.bits;
    if (seed_.is_zero()) {
      // fix the branch seed sign so the mirrored curve is counter-clockwise
      Cplx dp1 = pmap_d(ctx.R(1.0));
      Cplx seed = sqrt(-dp1);
      std::size_t n0 = 512;
      std::vector<Cplx> probe(n0, Cplx(prec));
      for (int flip = 0; flip < 2; ++flip) {
        walk_preimages(probe, n0, seed, false);
        std::vector<detail::cd> pd;
        for (std::size_t k = 0; k <= n0 / 2; ++k)
          pd.push_back(detail::cd(probe[k].re.to_double(), probe[k].im.to_double()));
        for (std::size_t k = n0 / 2 - 1; k >= 1; --k) pd.push_back(1.0 / pd[k]);
        if (detail::signed_area(pd) > 0) {
          seed_ = seed;
          // frozen equal-sigma reparametrization from the probe walk
          std::vector<detail::cd> closed(pd);
          auto angles = detail::sigma_reparam_angles(closed);
          std::vector<detail::cd> delta(n0);
          for (std::size_t k = 0; k < n0; ++k)
            delta[k] = detail::cd(angles[k] - 2 * M_PI * double(k) / double(n0), 0.0);
          detail::fft_d(delta, false);
          for (auto& v : delta) v /= double(n0);
          // a real odd delta keeps the mirrored construction seamless
          detail::enforce_odd(delta);
          for (auto& v : delta) v = detail::cd(0.0, v.imag());
          detail::truncate_lowpass(delta);
          reparam_series_ = SparseTrig(delta, prec);
          break;
        }
        seed = -seed;
        if (flip == 1)
          throw Error(ErrorCode::InvalidCurve, "could not orient parametrized curve counter-clockwise");
      }
    }
    walk_preimages(tau, n, seed_, true);
  }

  mutable SparseTrig log_seed_;    // generated curves: odd log-form reference parametrization
  mutable SparseTrig reparam_series_;  // parametrized curves: frozen odd equal-sigma map
  mutable Cplx seed_;              // branch seed at theta = 0
};

}  // namespace arcpade
