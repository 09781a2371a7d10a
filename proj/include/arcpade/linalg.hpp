#pragma once

#include <cstddef>
#include <vector>

#include "arcpade/complex.hpp"
#include "arcpade/rng.hpp"

namespace arcpade {

// Dense row-major complex matrix at working precision.
class CMatrix {
 public:
  CMatrix(std::size_t rows, std::size_t cols, mpfr_prec_t prec)
      : rows_(rows), cols_(cols), a_(rows * cols, Cplx(prec)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Cplx& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Cplx& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Real norm_inf() const {
    mpfr_prec_t p = a_.empty() ? 64 : a_.front().prec();
    Real m(p);
    for (std::size_t i = 0; i < rows_; ++i) {
      Real s(p);
      for (std::size_t j = 0; j < cols_; ++j) s += abs(at(i, j));
      m = max(m, s);
    }
    return m;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Cplx> a_;
};

// Column-pivoted LU of a square matrix. A pivot below eps * (original row max)
// signals a numerically singular system.
class LuFactor {
 public:
  LuFactor(const CMatrix& A, const Real& eps) : lu_(A), piv_(A.rows()) {
    std::size_t n = A.rows();
    if (A.cols() != n) throw Error(ErrorCode::DomainError, "LU requires a square matrix");
    mpfr_prec_t prec = eps.prec();
    std::vector<Real> rowmax;
    rowmax.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real m(prec);
      for (std::size_t j = 0; j < n; ++j) m = max(m, abs(A.at(i, j)));
      rowmax.push_back(m);
    }
    for (std::size_t i = 0; i < n; ++i) piv_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t best = k;
      Real bm = abs(lu_.at(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        Real m = abs(lu_.at(i, k));
        if (m > bm) { bm = m; best = i; }
      }
      if (best != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_.at(k, j), lu_.at(best, j));
        std::swap(piv_[k], piv_[best]);
      }
      if (!(bm > eps * rowmax[piv_[k]]))
        throw Error(ErrorCode::SingularMatrix, "pivot below eps * row max at step " + std::to_string(k));
      for (std::size_t i = k + 1; i < n; ++i) {
        Cplx f = lu_.at(i, k) / lu_.at(k, k);
        lu_.at(i, k) = f;
        for (std::size_t j = k + 1; j < n; ++j) lu_.at(i, j) -= f * lu_.at(k, j);
      }
    }
  }

  std::vector<Cplx> solve(const std::vector<Cplx>& b) const {
    std::size_t n = lu_.rows();
    std::vector<Cplx> x(n, Cplx(prec()));
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu_.at(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_.at(i, j) * x[j];
      x[i] = x[i] / lu_.at(i, i);
    }
    return x;
  }

  // Solve A^H x = b using the same factors.
  std::vector<Cplx> solve_adjoint(const std::vector<Cplx>& b) const {
    std::size_t n = lu_.rows();
    std::vector<Cplx> y(b);
    // U^H y = b (U^H is lower triangular)
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) y[i] -= conj(lu_.at(j, i)) * y[j];
      y[i] = y[i] / conj(lu_.at(i, i));
    }
    // L^H z = y (L^H is unit upper triangular)
    for (std::size_t i = n; i-- > 0;)
      for (std::size_t j = i + 1; j < n; ++j) y[i] -= conj(lu_.at(j, i)) * y[j];
    std::vector<Cplx> x(n, Cplx(prec()));
    for (std::size_t i = 0; i < n; ++i) x[piv_[i]] = y[i];
    return x;
  }

  mpfr_prec_t prec() const { return lu_.at(0, 0).prec(); }

 private:
  CMatrix lu_;
  std::vector<std::size_t> piv_;
};

struct SolveInfo {
  Real sigma_min_est;
  Real cond_est;  // 2-norm estimate sigma_max / sigma_min
};

inline Real vec_norm2(const std::vector<Cplx>& v) {
  mpfr_prec_t p = v.empty() ? 64 : v.front().prec();
  Real s(p);
  for (const auto& x : v) s += norm2(x);
  return sqrt(s);
}

inline Real vec_norm_inf(const std::vector<Cplx>& v) {
  mpfr_prec_t p = v.empty() ? 64 : v.front().prec();
  Real s(p);
  for (const auto& x : v) s = max(s, abs(x));
  return s;
}

// Power iterations with the factorization give cheap estimates of the extreme
// singular values; good to a few percent, which is all the residual gating needs.
inline SolveInfo estimate_spectrum(const CMatrix& A, const LuFactor& lu, int iters = 24) {
  std::size_t n = A.rows();
  mpfr_prec_t prec = lu.prec();
  SplitMix64 rng(0xA5C3u);
  std::vector<Cplx> x(n, Cplx(prec));
  for (auto& v : x) v = Cplx(rng.sym(), rng.sym(), prec);
  Real nrm = vec_norm2(x);
  for (auto& v : x) v = v / nrm;

  // sigma_min via inverse iteration on A^H A
  Real smin(prec);
  for (int it = 0; it < iters; ++it) {
    auto y = lu.solve(x);
    auto z = lu.solve_adjoint(y);
    Real zn = vec_norm2(z);
    if (zn.is_zero()) break;
    for (auto& v : z) v = v / zn;
    x = z;
    smin = Real(1.0, prec) / sqrt(zn);
  }

  // sigma_max via plain power iteration on A^H A
  std::vector<Cplx> u(n, Cplx(prec));
  SplitMix64 rng2(0x5EEDu);
  for (auto& v : u) v = Cplx(rng2.sym(), rng2.sym(), prec);
  Real un = vec_norm2(u);
  for (auto& v : u) v = v / un;
  Real smax(1.0, prec);
  for (int it = 0; it < iters; ++it) {
    std::vector<Cplx> y(n, Cplx(prec));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += A.at(i, j) * u[j];
    std::vector<Cplx> z(n, Cplx(prec));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) z[j] += conj(A.at(i, j)) * y[i];
    Real zn = vec_norm2(z);
    if (zn.is_zero()) break;
    for (auto& v : z) v = v / zn;
    u = z;
    smax = sqrt(zn);
  }

  SolveInfo info{smin, smax};
  if (!smin.is_zero()) info.cond_est = smax / smin;
  return info;
}

// Pivoted dense solve: x with A x = b.
inline std::vector<Cplx> solve_dense(const CMatrix& A, const std::vector<Cplx>& b, const Real& eps) {
  LuFactor lu(A, eps);
  return lu.solve(b);
}

}  // namespace arcpade
