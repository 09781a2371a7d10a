#include <catch2/catch_amalgamated.hpp>
#include <complex>

#include "arcpade/cauchy.hpp"

using namespace arcpade;

namespace {
const PrecisionContext ctx(192);
Cplx C(double re, double im = 0.0) { return Cplx(re, im, ctx.bits); }

// Independent oracle for segment integrals: t = cos u turns
// integral over F of g dt/w+ into -i * integral_0^pi g(cos u) du.
Cplx segment_oracle(const std::function<Cplx(const Cplx&)>& g, std::size_t n = 4096) {
  mpfr_prec_t prec = ctx.bits;
  Real pi = ctx.pi();
  Cplx acc(prec);
  // composite midpoint rule; the integrand is periodic-even so this converges fast
  for (std::size_t k = 0; k < n; ++k) {
    Real u = pi * ((double(k) + 0.5) / double(n));
    acc += g(Cplx(cos(u)));
  }
  acc = acc * (pi / double(n));
  return Cplx(0.0, -1.0, prec) * acc;
}
}  // namespace

TEST_CASE("pullback integrals on the segment match the direct oracle") {
  auto c = GammaCurve::segment(ctx, 8);
  auto one = [&](const GammaPt&) { return C(1); };
  auto tfun = [&](const GammaPt& p) { return p.t; };
  auto t2 = [&](const GammaPt& p) { return p.t * p.t; };

  Cplx i1 = pullback_integral(*c, one).value;
  Cplx i2 = pullback_integral(*c, tfun).value;
  Cplx i3 = pullback_integral(*c, t2).value;

  Real pi = ctx.pi();
  REQUIRE(abs_d(i1 - Cplx(ctx.R(0.0), -pi)) < 1e-40);
  REQUIRE(abs_d(i2) < 1e-40);
  REQUIRE(abs_d(i3 - Cplx(ctx.R(0.0), -pi * 0.5)) < 1e-40);

  // against the independent cos-substitution oracle
  REQUIRE(abs_d(i3 - segment_oracle([&](const Cplx& t) { return t * t; })) < 1e-30);
  auto expfun = [&](const GammaPt& p) { return exp(p.t); };
  Cplx ie = pullback_integral(*c, expfun).value;
  REQUIRE(abs_d(ie - segment_oracle([&](const Cplx& t) { return exp(t); })) < 1e-30);
}

TEST_CASE("pullback integral NotStabilized for a pole hugging the curve") {
  auto c = GammaCurve::segment(ctx, 8);
  Cplx pole = C(0.5, 1e-9);
  auto g = [&](const GammaPt& p) { return inv(p.t - pole); };
  REQUIRE_THROWS_AS(pullback_integral(*c, g), Error);
}

TEST_CASE("unit mass of the arcsine-type measure on any admissible arc") {
  // integral of i dt/(pi w+) is 1 on the segment and on a curved arc
  auto seg = GammaCurve::segment(ctx, 8);
  GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{Cplx(ctx.R(0.0), ctx.R(1.0) / 3.0), 1}};
  auto cur = GammaCurve::traced(ctx, gens, 9);
  for (const GammaCurve* c : {seg.get(), cur.get()}) {
    Cplx mass = pullback_integral(*c, [&](const GammaPt&) { return C(1); }).value;
    mass = mass * Cplx(0.0, 1.0, ctx.bits) / ctx.pi();
    REQUIRE(abs_d(mass - C(1)) < 1e-30);
  }
}

TEST_CASE("tanh-sinh handles endpoint singularities") {
  // integral over F of |2 t|^{1/2} dt/w+ on the segment against the oracle
  auto c = GammaCurve::segment(ctx, 8);
  auto g = [&](const GammaPt& p) {
    Real m = abs(p.t) * 2.0;
    return Cplx(sqrt(m));
  };
  // the pullback integrand has |cos|^(1/2) kinks at theta = pi/2, 3pi/2
  Real pi = ctx.pi();
  std::vector<Real> breaks = {pi * 0.5, pi * 1.5};
  Cplx v = pullback_integral(*c, g, breaks).value;
  // closed form: -i integral_0^pi sqrt(2|cos u|) du = -i sqrt(2 pi) Gamma(3/4)/Gamma(5/4)
  Real want_mag = sqrt(pi * 2.0) * gamma_fn(ctx.R(0.75)) / gamma_fn(ctx.R(1.25));
  Cplx want(ctx.R(0.0), -want_mag);
  REQUIRE(abs_d(v - want) < 1e-25);
}

TEST_CASE("cauchy transform residue identities") {
  GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{Cplx(ctx.R(0.0), ctx.R(1.0) / 3.0), 1}};
  auto cur = GammaCurve::traced(ctx, gens, 9);
  auto one = make_density(*cur, [&](const GammaPt&) { return C(1); });
  auto taud = make_density(*cur, [&](const GammaPt& p) { return p.tau; });

  // phi == 1: 1 inside, 0 outside
  REQUIRE(abs_d(cauchy_at(one, C(0.05, 0.1)) - C(1)) < 1e-35);
  REQUIRE(abs_d(cauchy_at(one, C(3, 2))) < 1e-35);
  // phi = tau: z inside
  Cplx zin = C(-0.1, -0.4);
  REQUIRE(abs_d(cauchy_at(taud, zin) - zin) < 1e-35);
  // too close to the curve is rejected
  REQUIRE_THROWS_AS(cauchy_at(one, C(1.0, 1e-8)), Error);
}

TEST_CASE("boundary values against the one-sided offset oracle") {
  // Independent oracle: plain quadrature at points offset from the node along
  // the normal, in double precision with a huge node count.
  auto c = GammaCurve::segment(ctx, 8);
  auto d = make_density(*c, [&](const GammaPt& p) { return p.tau * p.tau; });  // phi = tau^2
  auto plus = cauchy_plus_nodes(d);
  std::size_t n = d.size();

  std::size_t big = 1 << 17;
  double delta = 1e-3;
  auto oracle = [&](double theta, double off) {
    std::complex<double> z = std::polar(1.0 + off, theta);
    std::complex<double> acc = 0;
    for (std::size_t k = 0; k < big; ++k) {
      double tk = 2 * M_PI * double(k) / double(big);
      std::complex<double> tau = std::polar(1.0, tk);
      std::complex<double> dtau = tau * std::complex<double>(0, 1);
      acc += tau * tau * dtau / (tau - z);
    }
    return acc / std::complex<double>(0, 2 * M_PI) * (2 * M_PI / double(big));
  };

  for (std::size_t j : {std::size_t(3), std::size_t(64), std::size_t(150)}) {
    double theta = 2 * M_PI * double(j) / double(n);
    std::complex<double> inner = oracle(theta, -delta);
    std::complex<double> want(plus[j].re.to_double(), plus[j].im.to_double());
    REQUIRE(std::abs(inner - want) < 5e-3);  // offset bias is O(delta)
    // Richardson in the offset removes the linear term
    std::complex<double> inner2 = oracle(theta, -delta / 2);
    std::complex<double> extr = 2.0 * inner2 - inner;
    REQUIRE(std::abs(extr - want) < 5e-6);
  }
}

TEST_CASE("inversion identity for symmetric densities at the nodes") {
  // for phi(tau) = phi(1/tau):  (C phi)^+(tau) + (C phi)^+(1/tau) = phi + C phi(0)
  GeneratorSet gens = {Generator{C(0, -1), 1}, Generator{Cplx(ctx.R(0.0), ctx.R(1.0) / 3.0), 1}};
  auto cur = GammaCurve::traced(ctx, gens, 9);
  auto sym = make_density(*cur, [&](const GammaPt& p) { return p.t * p.t; });  // J(tau)^2 pulls back symmetric
  auto splus = cauchy_plus_nodes(sym);
  Cplx s0 = cauchy_at_zero(sym);
  std::size_t n = sym.size();
  double worst_sym = 0;
  for (std::size_t j = 1; j < n / 2; ++j) {
    Cplx lhs = splus[j] + splus[n - j];
    Cplx rhs = sym.values[j] + s0;
    worst_sym = std::max(worst_sym, abs_d(lhs - rhs));
  }
  REQUIRE(worst_sym < 1e-12);
}
