#pragma once

// Dense complex linear algebra primitives shared by every module:
// Kronecker products, unitarity/hermiticity checks, Haar sampling and
// the discrete Fourier unitary.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

#include "qx/errors.hpp"

namespace qx {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Largest matrix/vector dimension any operation is allowed to produce.
inline constexpr std::int64_t kDimensionCap = 1 << 22;

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

inline bool is_unitary(const Matrix& u, double tol = 1e-12) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol;
}

inline bool is_hermitian(const Matrix& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tol;
}

inline bool is_projector(const Matrix& p, double tol = 1e-9) {
  if (!is_hermitian(p, tol)) return false;
  return max_abs(p * p - p) <= tol;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::int64_t rows = std::int64_t(a.rows()) * b.rows();
  const std::int64_t cols = std::int64_t(a.cols()) * b.cols();
  if (rows > kDimensionCap || cols > kDimensionCap)
    throw DimensionCapError("kron: dimension product exceeds cap");
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Maximally entangled state (1/sqrt(D)) sum_x |x>|x> as a D^2 vector.
inline Vector max_entangled(int dim) {
  if (dim < 1) throw DimensionError("max_entangled: dim must be >= 1");
  Vector phi = Vector::Zero(std::int64_t(dim) * dim);
  const double amp = 1.0 / std::sqrt(double(dim));
  for (int x = 0; x < dim; ++x) phi(std::int64_t(x) * dim + x) = amp;
  return phi;
}

// D-dimensional discrete Fourier unitary F_{jk} = omega^{jk} / sqrt(D).
inline Matrix fourier(int dim) {
  if (dim < 1) throw DimensionError("fourier: dim must be >= 1");
  Matrix f(dim, dim);
  const double norm = 1.0 / std::sqrt(double(dim));
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) {
      const double angle = 2.0 * M_PI * double(std::int64_t(j) * k % dim) / dim;
      f(j, k) = norm * Complex(std::cos(angle), std::sin(angle));
    }
  return f;
}

// Haar-distributed unitary: complex Gaussian matrix, QR, then a column
// phase fix making the triangular factor's diagonal positive real.
inline Matrix haar_unitary(int dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("haar_unitary: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

// Random complex Gaussian vector, normalized; used by tests and seeding.
inline Vector random_state(std::int64_t dim, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("random_state: dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = Complex(re, im);
  }
  v.normalize();
  return v;
}

}  // namespace qx
