#include <catch2/catch_amalgamated.hpp>

#include "arcpade/arc.hpp"

using namespace arcpade;

namespace {
const PrecisionContext ctx(192);
Cplx C(double re, double im = 0.0) { return Cplx(re, im, ctx.bits); }
}  // namespace

TEST_CASE("joukowski basics") {
  REQUIRE(abs_d(joukowski(C(1)) - C(1)) == 0.0);
  REQUIRE(abs_d(joukowski(C(2)) - C(1.25)) < 1e-50);
  // circle to segment: J(e^{i pi/3}) = cos(pi/3) = 1/2
  Real th = ctx.pi() / 3.0;
  Cplx t = Cplx::polar(ctx.R(1.0), th);
  REQUIRE(abs_d(joukowski(t) - C(0.5)) < 1e-50);
  REQUIRE_THROWS_AS(joukowski(C(0)), Error);
}

TEST_CASE("level potential closed forms") {
  GeneratorSet g = {Generator{C(0), 1}};
  // single generator at the origin: u = log|tau|
  REQUIRE(std::abs(level_potential(g, C(2)).to_double() - std::log(2.0)) < 1e-15);
  // u(1) = 0 for any generator set
  GeneratorSet g2 = {Generator{C(0.3, -0.2), 2}, Generator{C(-0.1, 0.6), 1}};
  REQUIRE(std::abs(level_potential(g2, C(1)).to_double()) < 1e-50);
  // inversion antisymmetry u(1/tau) = -u(tau)
  Cplx tau = C(0.3, 0.4);
  Real s = level_potential(g2, tau) + level_potential(g2, inv(tau));
  REQUIRE(std::abs(s.to_double()) < 1e-50);
  REQUIRE_THROWS_AS(level_potential(g2, C(0.3, -0.2)), Error);
}

TEST_CASE("segment curve is the unit circle") {
  auto c = GammaCurve::segment(ctx, 8);
  const auto& g = c->grid(c->base_level());
  for (const auto& t : g.tau) REQUIRE(std::abs(abs_d(t) - 1.0) < 1e-15);
  // trapezoid of tau over the closed curve vanishes
  std::size_t n = g.tau.size();
  Cplx acc(ctx.bits);
  for (std::size_t k = 0; k < n; ++k) acc += g.tau[k] * g.dtau[k];
  REQUIRE(abs_d(acc) / double(n) < 1e-40);
}

TEST_CASE("traced single-generator curve is the unit circle") {
  auto c = GammaCurve::traced(ctx, {Generator{C(0), 1}}, 8);
  const auto& g = c->grid(c->base_level());
  double worst = 0;
  for (const auto& t : g.tau) worst = std::max(worst, std::abs(abs_d(t) - 1.0));
  REQUIRE(worst < 1e-10);
}

TEST_CASE("gamma invariants on traced pair for F_alpha") {
  // generators = Joukowski preimages of 0 and -4i/3; the traced level set is
  // the preimage curve of the Moebius arc with alpha = -1/2
  GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{C(0, 1.0 / 3.0), 1}};
  auto c = GammaCurve::traced(ctx, gens, 9);
  const auto& g = c->grid(c->base_level());
  std::size_t n = g.tau.size();

  // inversion symmetry and endpoints
  for (std::size_t k = 1; k < n / 2; ++k) REQUIRE(abs_d(g.tau[k] * g.tau[n - k] - C(1)) < 1e-30);
  REQUIRE(abs_d(g.tau[0] - C(1)) == 0.0);
  REQUIRE(abs_d(g.tau[n / 2] + C(1)) == 0.0);

  // level residual at nodes
  double lr = 0;
  for (std::size_t k = 0; k < n; ++k) lr = std::max(lr, std::abs(level_potential(gens, g.tau[k]).to_double()));
  REQUIRE(lr < 1e-40);

  // J-image passes through the F_alpha points (i a + x)/(1 + i a x), a=-1/2
  Real a = ctx.R(-0.5);
  auto arc = ArcF::build(c);
  for (double x : {0.0, 0.5, -0.5}) {
    Cplx i_unit = Cplx::i_unit(ctx.bits);
    Cplx fx = (i_unit * a + C(x)) / (C(1) + i_unit * (a * ctx.R(x)));
    REQUIRE_NOTHROW(arc->theta_of_point(fx, 1e-8));
  }
}

TEST_CASE("three-generator contour traces to a closed symmetric curve") {
  // z-plane points (i-3)/4, (87+6i)/104, -i/10 converted to tau preimages
  auto pre = [&](const Cplx& e) {
    Cplx r = sqrt(e * e - C(1));
    Cplx cand = e + r;
    if (abs(cand) > 1.0) cand = e - r;  // interior choice
    return cand;
  };
  GeneratorSet gens = {Generator{pre(C(-0.75, 0.25)), 1},
                       Generator{pre(C(87.0 / 104, 6.0 / 104)), 1},
                       Generator{pre(C(0, -0.1)), 1}};
  auto c = GammaCurve::traced(ctx, gens, 9);
  const auto& g = c->grid(c->base_level());
  std::size_t n = g.tau.size();
  for (std::size_t k = 1; k < n / 2; ++k) REQUIRE(abs_d(g.tau[k] * g.tau[n - k] - C(1)) < 1e-8);
  double lr = 0;
  for (std::size_t k = 0; k < n; ++k) lr = std::max(lr, std::abs(level_potential(gens, g.tau[k]).to_double()));
  REQUIRE(lr < 1e-10);
}

TEST_CASE("parametrized circle from identity map") {
  auto c = GammaCurve::from_parametrization(
      ctx, [](const Real& x) { return Cplx(x); },
      [](const Real& x) { return Cplx(Real(1.0, x.prec())); }, 8);
  const auto& g = c->grid(c->base_level());
  for (const auto& t : g.tau) REQUIRE(std::abs((abs(t) - 1.0).to_double()) < 1e-30);
}

TEST_CASE("cross-constructor agreement on F_alpha and the segment") {
  {
    auto para = f_alpha_curve(ctx, ctx.R(-0.5), 9);
    GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{Cplx(ctx.R(0.0), ctx.R(1.0) / 3.0), 1}};
    auto traced = GammaCurve::traced(ctx, gens, 9);
    int m = std::max(para->base_level(), traced->base_level());
    const auto& gp = para->grid(m);
    const auto& gt = traced->grid(m);
    double worst = 0;
    for (std::size_t k = 0; k < gp.tau.size(); ++k) worst = std::max(worst, abs_d(gp.tau[k] - gt.tau[k]));
    REQUIRE(worst < 1e-8);
  }
  {
    auto ident = GammaCurve::from_parametrization(
        ctx, [](const Real& x) { return Cplx(x); },
        [](const Real& x) { return Cplx(Real(1.0, x.prec())); }, 8);
    auto traced = GammaCurve::traced(ctx, {Generator{C(0), 1}}, 8);
    int m = std::max(ident->base_level(), traced->base_level());
    const auto& gp = ident->grid(m);
    const auto& gt = traced->grid(m);
    double worst = 0;
    for (std::size_t k = 0; k < gp.tau.size(); ++k) worst = std::max(worst, abs_d(gp.tau[k] - gt.tau[k]));
    REQUIRE(worst < 1e-8);
  }
}

TEST_CASE("phi_of on the segment") {
  auto c = GammaCurve::segment(ctx, 8);
  // z = 2 -> 2 + sqrt 3
  Cplx p2 = phi_of(C(2), *c);
  REQUIRE(abs_d(p2 - (C(2) + Cplx(sqrt(ctx.R(3.0))))) < 1e-40);
  // w(z)/z -> 1 far away
  Cplx wfar = w_of(C(1e3), *c);
  REQUIRE(abs_d(wfar / ctx.R(1e3) - C(1)) < 1e-5);
  // z close to the arc still resolves to the exterior preimage
  Cplx z = C(0.5, 0.001);
  Cplx p = phi_of(z, *c);
  REQUIRE(abs(p) > 1.0);
  REQUIRE(abs_d(joukowski(p) - z) < 1e-25);
  // points on the arc are rejected
  REQUIRE_THROWS_AS(phi_of(C(0.3), *c), Error);
}

TEST_CASE("r_eval properties") {
  auto c = GammaCurve::segment(ctx, 8);
  Cplx e = C(2, 1);
  REQUIRE(abs_d(r_eval(e, e, *c)) < 1e-40);
  // r(inf; 2) = 1/phi(2) = 1/(2+sqrt3)
  Cplx r = r_from_phi(C(0), true, phi_of(C(2), *c));
  REQUIRE(std::abs(abs_d(r) - 1.0 / (2 + std::sqrt(3.0))) < 1e-12);
}

TEST_CASE("r boundary products on a traced curve") {
  GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{Cplx(ctx.R(0.0), ctx.R(1.0) / 3.0), 1}};
  auto c = GammaCurve::traced(ctx, gens, 9);
  auto arc = ArcF::build(c);
  std::vector<Cplx> phis;
  for (const auto& gen : gens) phis.push_back(phi_of(joukowski(gen.eps), *c));
  double worst_prod_pm = 0, worst_level = 0;
  for (std::size_t j = 1; j + 1 < arc->samples.size(); ++j) {
    Cplx prod_plus(1.0, 0.0, ctx.bits);
    for (const auto& pe : phis) {
      Cplx rp = r_from_phi(pe, false, arc->samples[j].tau_plus);
      Cplx rm = r_from_phi(pe, false, arc->samples[j].tau_minus);
      // r^+ r^- = 1 holds per point
      worst_prod_pm = std::max(worst_prod_pm, abs_d(rp * rm - C(1)));
      prod_plus = prod_plus * rp;
    }
    // the traced level set makes the full product unimodular on each side
    worst_level = std::max(worst_level, std::abs(abs(prod_plus).to_double() - 1.0));
  }
  REQUIRE(worst_prod_pm < 1e-10);
  REQUIRE(worst_level < 1e-10);
}

TEST_CASE("r at infinity is unimodular on the segment boundary") {
  auto c = GammaCurve::segment(ctx, 8);
  auto arc = ArcF::build(c);
  double worst = 0;
  for (std::size_t j = 1; j + 1 < arc->samples.size(); ++j) {
    Cplx rp = r_from_phi(C(0), true, arc->samples[j].tau_plus);
    worst = std::max(worst, std::abs(abs(rp).to_double() - 1.0));
  }
  REQUIRE(worst < 1e-12);
}

TEST_CASE("arc frames satisfy the boundary identities") {
  GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{C(0, 1.0 / 3.0), 1}};
  auto c = GammaCurve::traced(ctx, gens, 9);
  auto arc = ArcF::build(c);
  for (const auto& s : arc->samples) {
    REQUIRE(abs_d(s.tau_plus * s.tau_minus - C(1)) < 1e-10);
    REQUIRE(abs_d(s.w_plus + s.w_minus) < 1e-10);
  }
  REQUIRE(abs_d(arc->samples.front().t + C(1)) < 1e-12);
  REQUIRE(abs_d(arc->samples.back().t - C(1)) < 1e-12);
}

TEST_CASE("mobius partner") {
  // alpha = 0 gives conjugation
  Cplx e = C(0.7, -0.4);
  REQUIRE(abs_d(mobius_partner(e, ctx.R(0.0)) - conj(e)) < 1e-50);
  // alpha = -1/2, e = 0 -> -4i/3
  Cplx p = mobius_partner(C(0), ctx.R(-0.5));
  Cplx want(ctx.R(0.0), ctx.R(-4.0) / 3.0);
  REQUIRE(abs_d(p - want) < 1e-50);
  // involution
  Cplx q = mobius_partner(C(1, 1), ctx.R(0.3));
  REQUIRE(abs_d(mobius_partner(q, ctx.R(0.3)) - C(1, 1)) < 1e-45);
}

TEST_CASE("theta_of_point locates arc points") {
  auto para = f_alpha_curve(ctx, ctx.R(-0.5), 9);
  auto arc = ArcF::build(para);
  // the mid point of F_{-1/2} is -i/2
  Real th = arc->theta_of_point(C(0, -0.5));
  Cplx t = joukowski(para->tau_at(th));
  REQUIRE(abs_d(t - C(0, -0.5)) < 1e-30);
}
