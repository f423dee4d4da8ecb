#pragma once

// Unitary ensembles, the matrix-free superoperator E^ = (1/d) sum U_i (x)
// U_i^*, and the expander quality lambda (second-largest singular value).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qx/eigs.hpp"
#include "qx/linalg.hpp"

namespace qx {

enum class EnsembleKind { kHaar, kHaarWithIdentity, kMargulis, kExplicit };

inline std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::kHaar: return "haar";
    case EnsembleKind::kHaarWithIdentity: return "haar-with-identity";
    case EnsembleKind::kMargulis: return "margulis";
    case EnsembleKind::kExplicit: return "explicit";
  }
  return "?";
}

inline EnsembleKind ensemble_kind_from(const std::string& s) {
  if (s == "haar") return EnsembleKind::kHaar;
  if (s == "haar-with-identity") return EnsembleKind::kHaarWithIdentity;
  if (s == "margulis") return EnsembleKind::kMargulis;
  if (s == "explicit") return EnsembleKind::kExplicit;
  throw ParameterError("unknown ensemble kind: " + s);
}

struct UnitaryEnsemble {
  EnsembleKind kind = EnsembleKind::kExplicit;
  int D = 0;
  int d = 0;
  std::optional<std::uint64_t> seed;
  std::vector<Matrix> unitaries;

  bool has_identity_first() const {
    return !unitaries.empty() &&
           max_abs(unitaries[0] - Matrix::Identity(D, D)) == 0.0;
  }
};

struct ExpanderReport {
  double lambda = 0.0;            // in [0, 1]
  double c = 1.0;                 // 1 - lambda
  double fixed_point_residual = 0.0;
};

// Quantum Margulis-type family on D = n^2: phase-space shear S (quadratic
// phase), shifted shear S X, their Fourier conjugates, and all adjoints.
// The Gabber-Galil shear permutations alone leave entry-orbit invariants
// intact (measured lambda = 1), so the shears act on phase space instead.
inline std::vector<Matrix> margulis_unitaries(int D) {
  int n = int(std::lround(std::sqrt(double(D))));
  if (n < 2 || n * n != D)
    throw DimensionError("margulis requires D = n^2 with n >= 2");
  Matrix shear = Matrix::Zero(D, D);
  for (int q = 0; q < D; ++q) {
    const double angle = M_PI * double(q) * double(q) / D;
    shear(q, q) = Complex(std::cos(angle), std::sin(angle));
  }
  Matrix shift = Matrix::Zero(D, D);
  for (int q = 0; q < D; ++q) shift((q + 1) % D, q) = 1.0;
  const Matrix f = fourier(D);
  std::vector<Matrix> u;
  u.push_back(shear);
  u.push_back(shear * shift);
  u.push_back(f * u[0] * f.adjoint());
  u.push_back(f * u[1] * f.adjoint());
  for (int i = 0; i < 4; ++i) u.push_back(u[i].adjoint());
  return u;
}

inline UnitaryEnsemble build_ensemble(EnsembleKind kind, int D, int d,
                                      std::optional<std::uint64_t> seed = {}) {
  if (D < 1) throw DimensionError("ensemble dimension must be >= 1");
  UnitaryEnsemble e;
  e.kind = kind;
  e.D = D;
  switch (kind) {
    case EnsembleKind::kHaar: {
      if (d < 2) throw EnsembleError("haar ensemble requires d >= 2");
      if (!seed) throw EnsembleError("haar ensemble requires a seed");
      e.d = d;
      e.seed = seed;
      for (int i = 0; i < d; ++i)
        e.unitaries.push_back(haar_unitary(D, *seed + std::uint64_t(i)));
      break;
    }
    case EnsembleKind::kHaarWithIdentity: {
      if (d < 2) throw EnsembleError("ensemble requires d >= 2");
      if (!seed) throw EnsembleError("haar ensemble requires a seed");
      e.d = d;
      e.seed = seed;
      e.unitaries.push_back(Matrix::Identity(D, D));
      for (int i = 1; i < d; ++i)
        e.unitaries.push_back(haar_unitary(D, *seed + std::uint64_t(i)));
      break;
    }
    case EnsembleKind::kMargulis: {
      if (d != 8) throw EnsembleError("margulis ensemble has d = 8");
      e.d = 8;
      e.unitaries = margulis_unitaries(D);
      break;
    }
    case EnsembleKind::kExplicit:
      throw EnsembleError("explicit ensembles are constructed from matrices");
  }
  return e;
}

inline UnitaryEnsemble explicit_ensemble(std::vector<Matrix> unitaries) {
  if (unitaries.empty()) throw EnsembleError("empty ensemble");
  UnitaryEnsemble e;
  e.kind = EnsembleKind::kExplicit;
  e.D = int(unitaries[0].rows());
  e.d = int(unitaries.size());
  for (const auto& u : unitaries) {
    if (u.rows() != e.D || u.cols() != e.D)
      throw DimensionError("ensemble members must share one dimension");
    if (!is_unitary(u, 1e-12))
      throw NonUnitaryError("ensemble member is not unitary");
  }
  e.unitaries = std::move(unitaries);
  return e;
}

// (1/d) sum_i (U_i (x) U_i^*) |psi>, computed as U_i P U_i^dag on the
// matrix form P of psi; cost O(d D^3), no D^2 x D^2 matrix materialized.
inline Vector apply_superop(const UnitaryEnsemble& e, const Vector& psi) {
  const std::int64_t D = e.D;
  if (psi.size() != D * D)
    throw DimensionError("superoperator input must live on C^D (x) C^D");
  // psi index (x, y) row-major -> matrix P with P(x, y) = psi(x*D + y):
  // (U (x) U^*) psi corresponds to U P U^dag.
  Eigen::Map<const Matrix> p(psi.data(), D, D);  // column-major: p(y, x)
  Matrix acc = Matrix::Zero(D, D);
  for (const auto& u : e.unitaries) acc += u.conjugate() * p * u.transpose();
  acc /= double(e.d);
  return Eigen::Map<const Vector>(acc.data(), D * D);
}

// Dense D^2 x D^2 matrix of E^; test oracle and small-D path.
inline Matrix superop_dense(const UnitaryEnsemble& e) {
  const std::int64_t D = e.D;
  if (D * D > 4096) throw DimensionCapError("dense superoperator too large");
  Matrix m = Matrix::Zero(D * D, D * D);
  for (const auto& u : e.unitaries) m += kron(u, u.conjugate());
  return m / double(e.d);
}

inline double fixed_point_residual(const UnitaryEnsemble& e) {
  const Vector phi = max_entangled(e.D);
  return (apply_superop(e, phi) - phi).norm();
}

// lambda = largest singular value of E^ on the orthogonal complement of
// |phi_D>.  Dense mode takes singular values of E^ - |phi><phi|; the
// iterative mode runs power iteration on E^dag E^ with explicit
// deflation of the known fixed point.
inline ExpanderReport expander_lambda(const UnitaryEnsemble& e,
                                      EigMode mode = EigMode::kDense) {
  ExpanderReport rep;
  rep.fixed_point_residual = fixed_point_residual(e);
  if (e.D == 1) {
    rep.lambda = 0.0;
    rep.c = 1.0;
    return rep;
  }
  const std::int64_t dim = std::int64_t(e.D) * e.D;
  const Vector phi = max_entangled(e.D);
  if (mode == EigMode::kDense) {
    if (dim > 4096)
      throw DimensionCapError("dense expander_lambda requires D^2 <= 4096");
    Matrix m = superop_dense(e) - phi * phi.adjoint();
    Eigen::JacobiSVD<Matrix> svd(m);
    rep.lambda = svd.singularValues()(0);
  } else {
    const UnitaryEnsemble* pe = &e;
    const auto deflate = [&phi](Vector& v) { v -= phi.dot(v) * phi; };
    Vector v = random_state(dim, 0xa5a5a5a5ULL);
    deflate(v);
    v.normalize();
    double value = 0.0;
    double prev = -1.0;
    UnitaryEnsemble adj = e;
    for (auto& u : adj.unitaries) u = u.adjoint().eval();
    int it = 0;
    for (; it < 5000; ++it) {
      Vector w = apply_superop(*pe, v);
      deflate(w);
      w = apply_superop(adj, w);
      deflate(w);
      value = std::sqrt(std::max(0.0, std::real(v.dot(w))));
      const double n = w.norm();
      if (n < 1e-300) { value = 0.0; break; }
      v = w / n;
      if (std::abs(value - prev) < 1e-13 * std::max(1.0, value)) break;
      prev = value;
    }
    if (it == 5000)
      throw ConvergenceError("expander_lambda power iteration stalled", value);
    rep.lambda = value;
  }
  rep.c = 1.0 - rep.lambda;
  return rep;
}

// Product ensemble {U_{i_1} ... U_{i_k}} of size d^k, for the iterated
// protocol variant.
inline UnitaryEnsemble product_ensemble(const UnitaryEnsemble& e, int k,
                                        int cap = 512) {
  if (k < 1) throw ParameterError("iteration count must be >= 1");
  double size = 1.0;
  for (int i = 0; i < k; ++i) size *= e.d;
  if (size > double(cap))
    throw DimensionCapError("product ensemble size d^k exceeds cap");
  std::vector<Matrix> members{Matrix::Identity(e.D, e.D)};
  for (int step = 0; step < k; ++step) {
    std::vector<Matrix> next;
    next.reserve(members.size() * e.unitaries.size());
    for (const auto& m : members)
      for (const auto& u : e.unitaries) next.push_back(u * m);
    members = std::move(next);
  }
  UnitaryEnsemble out = explicit_ensemble(std::move(members));
  out.seed = e.seed;
  return out;
}

// Seeded d=3 haar-with-identity ensemble; re-seeds (up to 32 tries) until
// the measured spectral gap c = 1 - lambda reaches 0.02.
struct CertifiedEnsemble {
  UnitaryEnsemble ensemble;
  ExpanderReport report;
  std::uint64_t chosen_seed = 0;
};

inline CertifiedEnsemble certified_d3_ensemble(int D, std::uint64_t seed,
                                               EigMode mode = EigMode::kDense) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    const std::uint64_t s = seed + std::uint64_t(attempt) * 0x10001ULL;
    UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaarWithIdentity, D, 3, s);
    ExpanderReport rep = expander_lambda(e, mode);
    if (rep.c >= 0.02) return {std::move(e), rep, s};
  }
  throw EnsembleError("no d=3 ensemble with c >= 0.02 found in 32 seeds");
}

}  // namespace qx
