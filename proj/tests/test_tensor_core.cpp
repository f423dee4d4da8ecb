#include <catch2/catch_amalgamated.hpp>

#include "qx/arealaw.hpp"
#include "qx/eigs.hpp"
#include "qx/linalg.hpp"
#include "qx/registered_state.hpp"

using namespace qx;

namespace {

double von_neumann_bits(const Matrix& rho) {
  EigResult eig = eig_dense(rho, false);
  double s = 0.0;
  for (int i = 0; i < eig.eigenvalues.size(); ++i) {
    const double p = eig.eigenvalues(i);
    if (p > 1e-12) s -= p * std::log2(p);
  }
  return s;
}

RegisteredState two_register_state(const Vector& amps, int D) {
  return RegisteredState({{"L", D}, {"R", D}}, amps);
}

}  // namespace

TEST_CASE("kron identity and diagonal cases") {
  CHECK(max_abs(kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)) -
                Matrix::Identity(6, 6)) == 0.0);
  Matrix sz = Matrix::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  Matrix expected = Matrix::Zero(4, 4);
  expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
  CHECK(max_abs(kron(sz, Matrix::Identity(2, 2)) - expected) == 0.0);
}

TEST_CASE("kron matches the nested-loop oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  Matrix a(2, 2), b(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      a(i, j) = Complex(gauss(rng), gauss(rng));
      b(i, j) = Complex(gauss(rng), gauss(rng));
    }
  const Matrix k = kron(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          CHECK(std::abs(k(i * 2 + p, j * 2 + q) - a(i, j) * b(p, q)) == 0.0);
}

TEST_CASE("kron dimension cap") {
  const Matrix big = Matrix::Identity(3000, 3000);
  CHECK_THROWS_AS(kron(big, big), DimensionCapError);
}

TEST_CASE("partial trace of a product state") {
  Vector amps = Vector::Zero(4);
  amps(1) = 1.0;  // |0> (x) |1>
  RegisteredState psi({{"A", 2}, {"B", 2}}, amps);
  Matrix rho = partial_trace(psi, {"A"});
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(max_abs(rho - expected) <= 1e-12);
}

TEST_CASE("partial trace of the maximally entangled state is I/D") {
  for (int D : {2, 3, 5}) {
    RegisteredState phi = two_register_state(max_entangled(D), D);
    for (const char* side : {"L", "R"}) {
      Matrix rho = partial_trace(phi, {side});
      CHECK(max_abs(rho - Matrix::Identity(D, D) / double(D)) <= 1e-12);
      CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("partial trace of the analytic ground state has flat spectrum") {
  const int D = 4;
  CertifiedEnsemble ce = certified_d3_ensemble(D, 21);
  RegisteredState g = analytic_ground_state(ce.ensemble);
  Matrix rho = partial_trace(g, {"SigmaL", "sigma1"});
  EigResult eig = eig_dense(rho, false);
  int count = 0;
  for (int i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > 1e-9) {
      CHECK(std::abs(eig.eigenvalues(i) - 1.0 / D) <= 1e-10);
      ++count;
    }
  CHECK(count == D);
}

TEST_CASE("schmidt of product and maximally entangled states") {
  Vector amps = Vector::Zero(4);
  amps(2) = 1.0;
  RegisteredState prod({{"A", 2}, {"B", 2}}, amps);
  SchmidtDecomposition sp = schmidt(prod, {"A"});
  int nonzero = 0;
  for (int i = 0; i < sp.coefficients.size(); ++i)
    if (sp.coefficients(i) > 1e-12) ++nonzero;
  CHECK(nonzero == 1);
  CHECK(std::abs(sp.coefficients(0) - 1.0) <= 1e-12);

  const int D = 6;
  RegisteredState phi = two_register_state(max_entangled(D), D);
  SchmidtDecomposition sd = schmidt(phi, {"L"});
  REQUIRE(sd.coefficients.size() == D);
  for (int i = 0; i < D; ++i)
    CHECK(std::abs(sd.coefficients(i) - 1.0 / std::sqrt(double(D))) <= 1e-12);
}

TEST_CASE("schmidt reconstruction and orthonormality") {
  RegisteredState psi({{"A", 3}, {"B", 2}, {"C", 4}}, random_state(24, 99));
  SchmidtDecomposition sd = schmidt(psi, {"B"});
  // orthonormal families
  CHECK(max_abs(sd.left_vectors.adjoint() * sd.left_vectors -
                Matrix::Identity(sd.left_vectors.cols(),
                                 sd.left_vectors.cols())) <= 1e-10);
  CHECK(max_abs(sd.right_vectors.adjoint() * sd.right_vectors -
                Matrix::Identity(sd.right_vectors.cols(),
                                 sd.right_vectors.cols())) <= 1e-10);
  CHECK(std::abs(sd.coefficients.squaredNorm() - 1.0) <= 1e-10);
  // reconstruct against the permuted amplitudes (cut order B | A C)
  RegisteredState perm = psi.permuted({"B", "A", "C"});
  Vector recon = Vector::Zero(24);
  for (int i = 0; i < sd.coefficients.size(); ++i)
    recon += sd.coefficients(i) *
             kron(Matrix(sd.left_vectors.col(i)),
                  Matrix(sd.right_vectors.col(i)))
                 .col(0);
  CHECK((recon - perm.amplitudes()).norm() <= 1e-10);
}

TEST_CASE("entanglement entropy basics") {
  Vector amps = Vector::Zero(4);
  amps(3) = 1.0;
  RegisteredState prod({{"A", 2}, {"B", 2}}, amps);
  CHECK(entanglement_entropy(prod, {"A"}) <= 1e-12);
  RegisteredState phi8 = two_register_state(max_entangled(8), 8);
  CHECK(std::abs(entanglement_entropy(phi8, {"L"}) - 3.0) <= 1e-10);
}

TEST_CASE("ground state entropy at D = 16 is 4 bits") {
  CertifiedEnsemble ce = certified_d3_ensemble(16, 21);
  RegisteredState g = analytic_ground_state(ce.ensemble);
  CHECK(std::abs(entanglement_entropy(g, h4_left_cut()) - 4.0) <= 1e-8);
}

TEST_CASE("haar unitary contract") {
  const Matrix u1 = haar_unitary(1, 7);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) <= 1e-12);
  CHECK(max_abs(haar_unitary(5, 42) - haar_unitary(5, 42)) == 0.0);
  for (int dim : {2, 17, 64, 256})
    CHECK(is_unitary(haar_unitary(dim, 1000 + dim), 1e-12));
  CHECK_THROWS_AS(haar_unitary(0, 1), DimensionError);
}

TEST_CASE("haar first moment of |tr U|^2") {
  double acc = 0.0;
  const int samples = 2000;
  for (int s = 0; s < samples; ++s)
    acc += std::norm(haar_unitary(8, 50000 + s).trace());
  CHECK(std::abs(acc / samples - 1.0) <= 0.1);
}

TEST_CASE("dense eigensolver on a diagonal matrix") {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 3.0, 1.0, 2.0;
  EigResult eig = eig_dense(h);
  CHECK(std::abs(eig.eigenvalues(0) - 1.0) <= 1e-12);
  CHECK(std::abs(eig.eigenvalues(1) - 2.0) <= 1e-12);
}

TEST_CASE("iterative agrees with dense on a random Hermitian matrix") {
  const int n = 50;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix h = (a + a.adjoint()) / 2.0;
  EigResult dense = eig_dense(h);
  EigResult iter = eig_lanczos(matvec_of(h), n, 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(dense.eigenvalues(i) - iter.eigenvalues(i)) <= 1e-7);
    // residual of the returned pair
    CHECK((h * iter.eigenvectors.col(i) -
           iter.eigenvalues(i) * iter.eigenvectors.col(i))
              .norm() <= 1e-8);
  }
}

TEST_CASE("four-particle Hamiltonian is frustration-free at D = 2") {
  CertifiedEnsemble ce = certified_d3_ensemble(2, 21);
  HamiltonianSpec h = build_h4(ce.ensemble);
  EigResult eig = hermitian_eigs(h.matvec(), h.dim(), 1, EigMode::kDense);
  CHECK(std::abs(eig.eigenvalues(0)) <= 1e-10);
}

TEST_CASE("entropy from schmidt equals entropy of the reduced state") {
  RegisteredState psi({{"A", 4}, {"B", 3}, {"C", 2}}, random_state(24, 3));
  for (const auto& cut :
       std::vector<std::vector<std::string>>{{"A"}, {"B"}, {"A", "C"}}) {
    const double from_schmidt = entanglement_entropy(psi, cut);
    const double from_rho = von_neumann_bits(partial_trace(psi, cut));
    CHECK(std::abs(from_schmidt - from_rho) <= 1e-8);
  }
}

TEST_CASE("both sides of a cut share the nonzero spectrum") {
  RegisteredState psi({{"A", 5}, {"B", 3}}, random_state(15, 12));
  EigResult left = eig_dense(partial_trace(psi, {"A"}), false);
  EigResult right = eig_dense(partial_trace(psi, {"B"}), false);
  std::vector<double> ls, rs;
  for (int i = 0; i < left.eigenvalues.size(); ++i)
    if (left.eigenvalues(i) > 1e-9) ls.push_back(left.eigenvalues(i));
  for (int i = 0; i < right.eigenvalues.size(); ++i)
    if (right.eigenvalues(i) > 1e-9) rs.push_back(right.eigenvalues(i));
  REQUIRE(ls.size() == rs.size());
  for (std::size_t i = 0; i < ls.size(); ++i)
    CHECK(std::abs(ls[i] - rs[i]) <= 1e-9);
}

TEST_CASE("register permutation is an involution") {
  RegisteredState psi({{"A", 2}, {"B", 3}, {"C", 2}}, random_state(12, 8));
  RegisteredState back =
      psi.permuted({"C", "A", "B"}).permuted({"A", "B", "C"});
  for (std::int64_t i = 0; i < psi.dim(); ++i)
    CHECK(psi.amplitudes()(i) == back.amplitudes()(i));
}

TEST_CASE("registered state validation") {
  CHECK_THROWS_AS(RegisteredState({{"A", 2}}, Vector::Zero(3)),
                  DimensionError);
  Vector bad = Vector::Zero(2);
  bad(0) = 0.5;
  CHECK_THROWS_AS(RegisteredState({{"A", 2}}, bad), ParameterError);
  RegisteredState psi({{"A", 2}}, bad, true);
  CHECK(std::abs(psi.amplitudes().norm() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(psi.permuted({"B"}), RegisterNameError);
}
