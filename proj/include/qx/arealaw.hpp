#pragma once

// The four-particle Hamiltonian H = H_L + H_M + H_R on
// Sigma_L (x) sigma_1 (x) sigma_2 (x) Sigma_R, its analytic ground state,
// block-matrix state form, spectral certification, and the two-projector
// minimum-eigenvalue identity.

#include <array>
#include <cstdint>

#include "qx/expander.hpp"
#include "qx/hamiltonian.hpp"

namespace qx {

struct SpectralReport {
  Eigen::VectorXd eigenvalues;  // ascending, lowest k
  int ground_degeneracy = 1;
  double gap = 0.0;  // E1 - E0
  bool frustration_free = false;
  bool unique_ground = false;
  bool gap_at_least_c4 = false;
  double lambda = 0.0;  // from the ensemble report
  double c = 0.0;
  double entropy_bits_mid_cut = 0.0;
  Vector ground_state;
};

// Register order is fixed: (SigmaL, sigma1, sigma2, SigmaR) with the
// middle cut between sigma1 and sigma2.
inline std::vector<Register> h4_registers(int D) {
  return {{"SigmaL", D}, {"sigma1", 3}, {"sigma2", 3}, {"SigmaR", D}};
}

inline Matrix h4_middle_term() {
  Matrix hm = Matrix::Zero(9, 9);
  // basis |i,j>, i major; states 1..3 are indices 0..2
  const auto add_pair = [&hm](int a, int b) {
    Vector v = Vector::Zero(9);
    v(a) = 1.0 / std::sqrt(2.0);
    v(b) = -1.0 / std::sqrt(2.0);
    hm += v * v.adjoint();
  };
  add_pair(0 * 3 + 1, 1 * 3 + 0);  // |12> - |21>
  add_pair(0 * 3 + 2, 2 * 3 + 0);  // |13> - |31>
  return hm;
}

inline HamiltonianSpec build_h4(const UnitaryEnsemble& e) {
  if (e.d != 3) throw EnsembleError("build_h4 needs a d = 3 ensemble");
  if (!e.has_identity_first())
    throw EnsembleError("build_h4 needs U_1 = I exactly");
  const int D = e.D;
  HamiltonianSpec spec(h4_registers(D));

  Matrix hl = Matrix::Identity(3 * D, 3 * D);
  for (int i = 0; i < 3; ++i)
    for (int ip = 0; ip < 3; ++ip) {
      Matrix basis = Matrix::Zero(3, 3);
      basis(i, ip) = 1.0;
      hl -= kron(e.unitaries[i] * e.unitaries[ip].adjoint(), basis) / 3.0;
    }
  spec.add_term({"H_L", {0, 1}, hl, 1.0, true});

  spec.add_term({"H_M", {1, 2}, h4_middle_term(), 1.0, true});

  // zero space: fibers sum_j |j> (x) U_j^T v, i.e. blocks
  // psi_{i,j} = psi_{i,1} U_j
  Matrix hr = Matrix::Identity(3 * D, 3 * D);
  for (int j = 0; j < 3; ++j)
    for (int jp = 0; jp < 3; ++jp) {
      Matrix basis = Matrix::Zero(3, 3);
      basis(j, jp) = 1.0;
      hr -= kron(basis,
                 (e.unitaries[jp].adjoint() * e.unitaries[j]).transpose()) /
            3.0;
    }
  spec.add_term({"H_R", {2, 3}, hr, 1.0, true});
  return spec;
}

// 3x3 array of D x D blocks psi_{i,j}; the state's amplitude at
// (x, i, j, y) is psi_{i,j}(x, y).
struct BlockMatrixState {
  std::array<std::array<Matrix, 3>, 3> blocks;
};

inline RegisteredState state_from_blocks(const BlockMatrixState& b) {
  const int D = int(b.blocks[0][0].rows());
  Vector amps(std::int64_t(9) * D * D);
  for (int x = 0; x < D; ++x)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int y = 0; y < D; ++y)
          amps(((std::int64_t(x) * 3 + i) * 3 + j) * D + y) =
              b.blocks[i][j](x, y);
  return RegisteredState(h4_registers(D), std::move(amps));
}

inline BlockMatrixState blocks_from_state(const RegisteredState& s) {
  const auto& regs = s.registers();
  if (regs.size() != 4 || regs[1].dim != 3 || regs[2].dim != 3 ||
      regs[0].dim != regs[3].dim)
    throw RegisterNameError("expected registers (SigmaL, s1, s2, SigmaR)");
  const int D = regs[0].dim;
  BlockMatrixState b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      b.blocks[i][j] = Matrix(D, D);
      for (int x = 0; x < D; ++x)
        for (int y = 0; y < D; ++y)
          b.blocks[i][j](x, y) =
              s.amplitudes()(((std::int64_t(x) * 3 + i) * 3 + j) * D + y);
    }
  return b;
}

// |G> with blocks U_i U_j / (3 sqrt(D)), U_1 = I.
inline RegisteredState analytic_ground_state(const UnitaryEnsemble& e) {
  if (e.d != 3 || !e.has_identity_first())
    throw EnsembleError("analytic ground state needs d = 3 and U_1 = I");
  const double scale = 1.0 / (3.0 * std::sqrt(double(e.D)));
  BlockMatrixState b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      b.blocks[i][j] = scale * e.unitaries[i] * e.unitaries[j];
  return state_from_blocks(b);
}

inline std::vector<std::string> h4_left_cut() { return {"SigmaL", "sigma1"}; }

inline SpectralReport certify(const HamiltonianSpec& spec,
                              const ExpanderReport& ensemble_report,
                              EigMode mode = EigMode::kDense, int k = 3) {
  SpectralReport rep;
  rep.lambda = ensemble_report.lambda;
  rep.c = ensemble_report.c;
  EigResult eig;
  if (mode == EigMode::kDense) {
    eig = hermitian_eigs(spec.matvec(), spec.dim(), k, EigMode::kDense);
  } else {
    LanczosOptions opt;
    opt.max_iter = 1000;
    eig = eig_lanczos(spec.matvec(), spec.dim(), k, opt);
  }
  rep.eigenvalues = eig.eigenvalues;
  const double tol = degeneracy_tol(spec.norm_upper_bound());
  rep.ground_degeneracy = 1;
  for (int i = 1; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) - eig.eigenvalues(0) <= tol)
      ++rep.ground_degeneracy;
  rep.gap = (eig.eigenvalues.size() > 1)
                ? eig.eigenvalues(1) - eig.eigenvalues(0)
                : 0.0;
  rep.frustration_free = eig.eigenvalues(0) <= 1e-10;
  rep.unique_ground = rep.ground_degeneracy == 1 && rep.gap > tol;
  rep.gap_at_least_c4 = rep.gap >= ensemble_report.c / 4.0 - 1e-9;
  rep.ground_state = eig.eigenvectors.col(0);
  RegisteredState ground(spec.registers(), rep.ground_state, true);
  rep.entropy_bits_mid_cut = entanglement_entropy(ground, h4_left_cut());
  return rep;
}

struct TwoProjectorResult {
  double mu = 0.0;        // lambda_min(P1 P2 P1) on range(P1)
  double min_eig = 0.0;   // lambda_min(I - P1 + P2), dense
  double predicted = 0.0; // 1 - sqrt(1 - mu)
};

inline TwoProjectorResult min_eig_two_projectors(const Matrix& p1,
                                                 const Matrix& p2) {
  if (!is_projector(p1, 1e-9) || !is_projector(p2, 1e-9))
    throw ProjectorError("inputs must be projectors");
  if (p1.rows() != p2.rows())
    throw DimensionError("projectors must share a dimension");
  EigResult e1 = eig_dense(p1);
  std::vector<int> range_cols;
  for (int i = 0; i < e1.eigenvalues.size(); ++i)
    if (e1.eigenvalues(i) > 0.5) range_cols.push_back(i);
  if (range_cols.empty()) throw ProjectorError("P1 must be nonzero");
  Matrix q(p1.rows(), range_cols.size());
  for (std::size_t i = 0; i < range_cols.size(); ++i)
    q.col(i) = e1.eigenvectors.col(range_cols[i]);
  TwoProjectorResult out;
  out.mu = eig_dense(Matrix(q.adjoint() * p2 * q), false).eigenvalues(0);
  out.mu = std::clamp(out.mu, 0.0, 1.0);
  // range(P1) inside range(P2) gives mu = 1 exactly; snap to avoid the
  // sqrt amplifying eigenvalue round-off near that point
  if (out.mu > 1.0 - 1e-12) out.mu = 1.0;
  const std::int64_t n = p1.rows();
  out.min_eig =
      eig_dense(Matrix(Matrix::Identity(n, n) - p1 + p2), false).eigenvalues(0);
  out.predicted = 1.0 - std::sqrt(1.0 - out.mu);
  return out;
}

struct QexpInequalityReport {
  int trials = 0;
  int violations_average = 0;   // |E(X)| <= (1 - c) failures
  int violations_commutator = 0;  // |U2XU2'-X| + |U3XU3'-X| >= 3c failures
  double min_slack_average = 0.0;
  double min_slack_commutator = 0.0;
};

// Random traceless unit-Frobenius X; checks Eq. (qexp) and the triangle
// consequence Eq. (qexp2) with the measured c = 1 - lambda.
inline QexpInequalityReport verify_qexp_inequalities(const UnitaryEnsemble& e,
                                                     double c, int trials,
                                                     std::uint64_t seed = 7) {
  if (e.d != 3 || !e.has_identity_first())
    throw EnsembleError("inequality check needs d = 3 with U_1 = I");
  const int D = e.D;
  QexpInequalityReport rep;
  rep.trials = trials;
  rep.min_slack_average = std::numeric_limits<double>::infinity();
  rep.min_slack_commutator = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    Matrix x(D, D);
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) x(a, b) = Complex(gauss(rng), gauss(rng));
    x -= (x.trace() / double(D)) * Matrix::Identity(D, D);
    x /= x.norm();
    const Matrix x2 = e.unitaries[1] * x * e.unitaries[1].adjoint();
    const Matrix x3 = e.unitaries[2] * x * e.unitaries[2].adjoint();
    const double avg = (x + x2 + x3).norm() / 3.0;
    const double comm = (x2 - x).norm() + (x3 - x).norm();
    const double slack_avg = (1.0 - c) - avg;
    const double slack_comm = comm - 3.0 * c;
    if (slack_avg < -1e-9) ++rep.violations_average;
    if (slack_comm < -1e-9) ++rep.violations_commutator;
    rep.min_slack_average = std::min(rep.min_slack_average, slack_avg);
    rep.min_slack_commutator = std::min(rep.min_slack_commutator, slack_comm);
  }
  return rep;
}

// Dimension of the joint commutant {X : X U_i = U_i X for i = 2, 3},
// via the nullspace of the stacked commutator map.
inline int commutant_dimension(const UnitaryEnsemble& e, double tol = 1e-8) {
  const int D = e.D;
  const std::int64_t n = std::int64_t(D) * D;
  Matrix map = Matrix::Zero(2 * n, n);
  for (int which = 0; which < 2; ++which) {
    const Matrix& u = e.unitaries[which + 1];
    // vec(XU - UX) with vec(X)_{a*D+b} = X(a,b):
    // row (a,b): sum_c X(a,c) U(c,b) - U(a,c) X(c,b)
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        for (int c = 0; c < D; ++c) {
          map(which * n + std::int64_t(a) * D + b, std::int64_t(a) * D + c) +=
              u(c, b);
          map(which * n + std::int64_t(a) * D + b, std::int64_t(c) * D + b) -=
              u(a, c);
        }
  }
  Eigen::JacobiSVD<Matrix> svd(map);
  int null_dim = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) < tol) ++null_dim;
  return null_dim;
}

}  // namespace qx
