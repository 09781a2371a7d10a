#include <catch2/catch_amalgamated.hpp>

#include "arcpade/linalg.hpp"
#include "arcpade/poly.hpp"

using namespace arcpade;

namespace {
const PrecisionContext ctx(192);

Cplx C(double re, double im = 0.0) { return Cplx(re, im, ctx.bits); }

bool close(const Cplx& a, const Cplx& b, double tol) { return abs(a - b).to_double() <= tol; }
}  // namespace

TEST_CASE("poly_eval matches hand values") {
  // z^2 - 1 at 1
  Polynomial p({C(-1), C(0), C(1)});
  REQUIRE(abs(p.eval(C(1))).to_double() == 0.0);

  // constant 1 at 7+3i
  Polynomial one({C(1)});
  REQUIRE(close(one.eval(C(7, 3)), C(1), 0.0));

  // z^3 - (3/4) z at 1/2: exact rational arithmetic gives 1/8 - 3/8 = -1/4
  Polynomial cheb3({C(0), Cplx(Real(-3.0, ctx.bits) / 4.0, Real(0.0, ctx.bits)), C(0), C(1)});
  Cplx v = cheb3.eval(C(0.5));
  REQUIRE(close(v, C(-0.25), 1e-55));
}

TEST_CASE("poly_eval referential transparency") {
  Polynomial p({C(0.125, -0.5), C(2, 3), C(-1, 0.25)});
  Cplx z = C(0.7, -0.3);
  Cplx a = p.eval(z), b = p.eval(z);
  REQUIRE(a.re.str() == b.re.str());
  REQUIRE(a.im.str() == b.im.str());
}

TEST_CASE("solve_dense identity and diagonal") {
  Real eps = ctx.eps();
  {
    CMatrix A(2, 2, ctx.bits);
    A.at(0, 0) = C(1);
    A.at(1, 1) = C(1);
    auto x = solve_dense(A, {C(1), C(0, 1)}, eps);
    REQUIRE(close(x[0], C(1), 1e-55));
    REQUIRE(close(x[1], C(0, 1), 1e-55));
  }
  {
    CMatrix A(2, 2, ctx.bits);
    A.at(0, 0) = C(2);
    A.at(1, 1) = C(0, 1);
    auto x = solve_dense(A, {C(2), C(0, 1)}, eps);
    REQUIRE(close(x[0], C(1), 1e-55));
    REQUIRE(close(x[1], C(1), 1e-55));
  }
}

TEST_CASE("solve_dense random 8x8 self-consistency at 128 bits") {
  PrecisionContext c128(128);
  SplitMix64 rng(42);
  std::size_t n = 8;
  CMatrix A(n, n, c128.bits);
  std::vector<Cplx> xt;
  for (std::size_t i = 0; i < n; ++i) {
    xt.push_back(Cplx(rng.sym(), rng.sym(), c128.bits));
    for (std::size_t j = 0; j < n; ++j) A.at(i, j) = Cplx(rng.sym(), rng.sym(), c128.bits);
  }
  std::vector<Cplx> b(n, Cplx(c128.bits));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i] += A.at(i, j) * xt[j];
  auto x = solve_dense(A, b, c128.eps());
  Real err(c128.bits), scale(c128.bits);
  for (std::size_t i = 0; i < n; ++i) {
    err = max(err, abs(x[i] - xt[i]));
    scale = max(scale, abs(xt[i]));
  }
  REQUIRE((err / scale).to_double() < 1e-20);
}

TEST_CASE("solve_dense error within condition bound") {
  SplitMix64 rng(7);
  std::size_t n = 12;
  CMatrix A(n, n, ctx.bits);
  std::vector<Cplx> xt;
  for (std::size_t i = 0; i < n; ++i) {
    xt.push_back(Cplx(rng.sym(), rng.sym(), ctx.bits));
    for (std::size_t j = 0; j < n; ++j) A.at(i, j) = Cplx(rng.sym(), rng.sym(), ctx.bits);
  }
  std::vector<Cplx> b(n, Cplx(ctx.bits));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i] += A.at(i, j) * xt[j];
  LuFactor lu(A, ctx.eps());
  auto x = lu.solve(b);
  auto info = estimate_spectrum(A, lu);
  Real err(ctx.bits), nx(ctx.bits);
  for (std::size_t i = 0; i < n; ++i) {
    err = max(err, abs(x[i] - xt[i]));
    nx = max(nx, abs(xt[i]));
  }
  REQUIRE((err / nx) <= info.cond_est * ctx.eps() * 1e2);
}

TEST_CASE("singular matrix is reported") {
  CMatrix A(2, 2, ctx.bits);
  A.at(0, 0) = C(1);
  A.at(0, 1) = C(2);
  A.at(1, 0) = C(2);
  A.at(1, 1) = C(4);
  REQUIRE_THROWS_AS(solve_dense(A, {C(1), C(1)}, ctx.eps()), Error);
}

TEST_CASE("poly_roots simple cases") {
  {
    Polynomial p({C(-1), C(0), C(1)});  // z^2 - 1
    auto r = poly_roots(p);
    REQUIRE(r.roots.size() == 2);
    Real prod = abs(r.roots[0] - r.roots[1]);
    REQUIRE(std::abs(prod.to_double() - 2.0) < 1e-40);
    for (auto& z : r.roots) REQUIRE(std::abs(std::abs(z.re.to_double()) - 1.0) < 1e-40);
  }
  {
    Polynomial p({C(0), C(1)});  // z
    auto r = poly_roots(p);
    REQUIRE(r.roots.size() == 1);
    REQUIRE(abs(r.roots[0]).to_double() == 0.0);
  }
}

TEST_CASE("poly_roots monic Chebyshev degree 3 against closed form") {
  // roots of z^3 - (3/4) z are cos((2k+1)pi/6): {sqrt(3)/2, 0, -sqrt(3)/2}
  Polynomial p({C(0), Cplx(Real(-0.75, ctx.bits), Real(0.0, ctx.bits)), C(0), C(1)});
  auto r = poly_roots(p);
  REQUIRE(r.roots.size() == 3);
  Real s3 = sqrt(Real(3.0, ctx.bits)) / 2.0;
  std::vector<Cplx> want = {Cplx(s3), Cplx(Real(0.0, ctx.bits)), Cplx(-s3)};
  for (const auto& w : want) {
    Real best(1e9, ctx.bits);
    for (auto& z : r.roots) best = min(best, abs(z - w));
    REQUIRE(best.to_double() < 1e-45);
  }
}

TEST_CASE("poly_roots re-expansion property on random simple roots") {
  SplitMix64 rng(1234);
  for (int deg : {5, 12, 25}) {
    std::vector<Cplx> roots;
    for (int k = 0; k < deg; ++k) roots.push_back(Cplx(2.0 * rng.sym(), 2.0 * rng.sym(), ctx.bits));
    Polynomial p = Polynomial::from_roots(roots, ctx.bits);
    auto r = poly_roots(p);
    Polynomial q = Polynomial::from_roots(r.roots, ctx.bits);
    Real err(ctx.bits);
    for (std::size_t k = 0; k < p.coeffs().size(); ++k) err = max(err, abs(p[k] - q[k]));
    REQUIRE((err / p.max_coeff_abs()) <= ctx.eps() * (1e3 * deg));
  }
}

TEST_CASE("poly_roots recovers moderate multiplicities") {
  // (z-1)^4 (z+0.5-0.25i)^2 style cluster refinement
  std::vector<Cplx> roots;
  for (int k = 0; k < 4; ++k) roots.push_back(C(1));
  for (int k = 0; k < 2; ++k) roots.push_back(C(-0.5, 0.25));
  Polynomial p = Polynomial::from_roots(roots, ctx.bits);
  auto r = poly_roots(p);
  REQUIRE(r.roots.size() == 6);
  int near1 = 0, near2 = 0;
  for (auto& z : r.roots) {
    if (abs_d(z - C(1)) < 1e-10) ++near1;
    if (abs_d(z - C(-0.5, 0.25)) < 1e-10) ++near2;
  }
  REQUIRE(near1 == 4);
  REQUIRE(near2 == 2);
}

TEST_CASE("poly_roots is deterministic") {
  Polynomial p({C(1, 1), C(-2, 0.5), C(0.25), C(1)});
  auto a = poly_roots(p), b = poly_roots(p);
  for (std::size_t k = 0; k < a.roots.size(); ++k) {
    REQUIRE(a.roots[k].re.str() == b.roots[k].re.str());
    REQUIRE(a.roots[k].im.str() == b.roots[k].im.str());
  }
}
