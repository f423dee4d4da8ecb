#pragma once

// Hermitian eigensolvers: a LAPACK-backed dense path and a matrix-free
// Lanczos path with full reorthogonalization.

#include <complex>
#include <functional>
#include <vector>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "qx/linalg.hpp"

namespace qx {

using MatVec = std::function<void(const Vector&, Vector&)>;

struct EigResult {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // columns match eigenvalues
};

// Full spectrum of a Hermitian matrix, ascending.  LAPACK zheevd.
inline EigResult eig_dense(const Matrix& h, bool vectors = true,
                           double hermitian_tol = 1e-10) {
  if (h.rows() != h.cols()) throw DimensionError("eig_dense: non-square");
  if (!is_hermitian(h, hermitian_tol))
    throw ParameterError("eig_dense: matrix is not Hermitian");
  const lapack_int n = lapack_int(h.rows());
  Matrix a = (h + h.adjoint()) / 2.0;
  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0)
    throw ConvergenceError("zheevd failed, info=" + std::to_string(info), 0.0);
  EigResult out;
  out.eigenvalues = std::move(w);
  if (vectors) out.eigenvectors = std::move(a);
  return out;
}

struct LanczosOptions {
  int max_iter = 600;
  double tol = 1e-10;           // residual ||Hv - Ev||
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

// Lowest-k eigenpairs of a Hermitian operator given only a matvec.
// Full reorthogonalization against all stored Lanczos vectors; seeded
// deterministic start vector.
inline EigResult eig_lanczos(const MatVec& apply, std::int64_t dim, int k,
                             const LanczosOptions& opt = {}) {
  if (k < 1 || k > dim) throw ParameterError("eig_lanczos: bad k");
  const int max_iter = int(std::min<std::int64_t>(opt.max_iter, dim));
  std::vector<Vector> basis;
  basis.reserve(max_iter);
  std::vector<double> alpha, beta;
  Vector v = random_state(dim, opt.seed);
  Vector w(dim);
  double best_residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    apply(v, w);
    const double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= a * v;
    if (it > 0) w -= beta.back() * basis[it - 1];
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b.dot(w) * b;
    const double bnorm = w.norm();

    const int m = it + 1;
    if (m >= k && (m % 5 == 0 || bnorm < 1e-14 || it == max_iter - 1)) {
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      // residual bound for Ritz pair i is |beta_m * y(m-1, i)|
      double res = 0.0;
      for (int i = 0; i < k; ++i)
        res = std::max(res, std::abs(bnorm * es.eigenvectors()(m - 1, i)));
      best_residual = std::min(best_residual, res);
      if (res < opt.tol || bnorm < 1e-14 || m == dim) {
        EigResult out;
        out.eigenvalues = es.eigenvalues().head(k);
        out.eigenvectors = Matrix::Zero(dim, k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < m; ++j)
            out.eigenvectors.col(i) += es.eigenvectors()(j, i) * basis[j];
        for (int i = 0; i < k; ++i) out.eigenvectors.col(i).normalize();
        return out;
      }
    }
    if (bnorm < 1e-14) break;  // exact invariant subspace, handled above
    beta.push_back(bnorm);
    v = w / bnorm;
  }
  throw ConvergenceError("lanczos: no convergence after iteration cap",
                         best_residual);
}

enum class EigMode { kDense, kIterative };

// Unified entry point used by the modules: dense is mandatory for
// dim <= 4096, iterative above (unless forced).
inline EigResult hermitian_eigs(const MatVec& apply, std::int64_t dim, int k,
                                EigMode mode) {
  if (mode == EigMode::kDense) {
    if (dim > 4096)
      throw DimensionCapError("dense eigensolver limited to dim <= 4096");
    Matrix h(dim, dim);
    Vector e = Vector::Zero(dim), col(dim);
    for (std::int64_t j = 0; j < dim; ++j) {
      e(j) = 1.0;
      apply(e, col);
      h.col(j) = col;
      e(j) = 0.0;
    }
    EigResult full = eig_dense(h);
    EigResult out;
    out.eigenvalues = full.eigenvalues.head(k);
    out.eigenvectors = full.eigenvectors.leftCols(k);
    return out;
  }
  return eig_lanczos(apply, dim, k);
}

inline MatVec matvec_of(const Matrix& h) {
  return [&h](const Vector& x, Vector& y) { y = h * x; };
}

// Degeneracy tolerance: eigenvalues within 1e-9 * max(1, ||H||) coincide.
inline double degeneracy_tol(double operator_norm_estimate) {
  return 1e-9 * std::max(1.0, operator_norm_estimate);
}

}  // namespace qx
