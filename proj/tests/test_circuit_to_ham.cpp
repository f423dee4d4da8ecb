#include <catch2/catch_amalgamated.hpp>

#include "qx/circuit_to_ham.hpp"
#include "qx/report_io.hpp"

using namespace qx;

namespace {

CircuitSpec identity_circuit(int D, int T) {
  CircuitSpec c;
  c.D = D;
  c.padded_length = T;
  return c;
}

HamiltonianSpec only_named(const HamiltonianSpec& spec,
                           const std::string& name) {
  HamiltonianSpec out(spec.registers());
  for (const auto& t : spec.terms())
    if (t.name == name) out.add_term(t);
  return out;
}

}  // namespace

TEST_CASE("clock Hamiltonian ground degeneracy with and without init") {
  // T = 1 identity circuit at D = 3: the propagation part alone has a
  // 3D-dimensional zero space (control and data free); adding the
  // initialization term pins the control to its uniform state, leaving
  // exactly the D history states.
  const int D = 3;
  CircuitSpec c = identity_circuit(D, 1);
  HamiltonianSpec full = build_kitaev(c);
  HamiltonianSpec prop = only_named(full, "prop");

  EigResult ep = eig_dense(prop.dense(), false);
  int zeros_prop = 0;
  for (int i = 0; i < ep.eigenvalues.size(); ++i)
    if (std::abs(ep.eigenvalues(i)) <= 1e-10) ++zeros_prop;
  CHECK(zeros_prop == 3 * D);

  EigResult ef = eig_dense(full.dense(), false);
  int zeros_full = 0;
  for (int i = 0; i < ef.eigenvalues.size(); ++i)
    if (std::abs(ef.eigenvalues(i)) <= 1e-10) ++zeros_full;
  CHECK(zeros_full == D);
}

TEST_CASE("every clock term is a projector") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaarWithIdentity, 2, 3, 5);
  CircuitSpec c{2, 1, {controlled_expander_gate(e, false)}, 4};
  HamiltonianSpec h = build_kitaev(c);
  for (const auto& t : h.terms()) {
    CHECK(t.projector);
    CHECK(is_projector(t.op, 1e-9));
  }
}

TEST_CASE("history states have zero energy") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaarWithIdentity, 4, 3, 9);
  for (int T : {2, 16, 64}) {
    CircuitSpec c{4, 0, {controlled_expander_gate(e, false)}, T};
    HamiltonianSpec h = build_kitaev(c);
    for (int x = 0; x < 4; ++x) {
      RegisteredState hist = build_history_state(c, x);
      CHECK(std::abs(hist.amplitudes().norm() - 1.0) <= 1e-12);
      Vector hpsi;
      h.apply(hist.amplitudes(), hpsi);
      CHECK(hpsi.norm() <= 1e-10);
    }
  }
}

TEST_CASE("ground space is spanned by the history states") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaarWithIdentity, 2, 3, 3);
  const int D = 2;
  for (int T : {2, 8}) {
    CircuitSpec c{D, 0, {controlled_expander_gate(e, false)}, T};
    HamiltonianSpec h = build_kitaev(c);
    EigResult eig = eig_dense(h.dense());
    int zeros = 0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i)
      if (std::abs(eig.eigenvalues(i)) <= 1e-10) ++zeros;
    REQUIRE(zeros == D);
    // each numerical zero mode lies in span{history_0, history_1}
    Matrix basis(h.dim(), D);
    for (int x = 0; x < D; ++x)
      basis.col(x) = build_history_state(c, x).amplitudes();
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = Matrix(qr.householderQ()).leftCols(D);
    for (int i = 0; i < zeros; ++i) {
      const Vector v = eig.eigenvectors.col(i);
      CHECK((v - q * (q.adjoint() * v)).norm() <= 1e-6);
    }
  }
}

TEST_CASE("gap of the padded identity circuit scales like T^-2") {
  std::vector<double> ts, gaps;
  for (int T : {4, 8, 16, 32}) {
    CircuitSpec c = identity_circuit(2, T);
    HamiltonianSpec h = build_kitaev(c);
    EigResult eig = eig_dense(h.dense(), false);
    CHECK(eig.eigenvalues(0) <= 1e-10);
    double gap = 0.0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i)
      if (eig.eigenvalues(i) > 1e-10) {
        gap = eig.eigenvalues(i);
        break;
      }
    ts.push_back(double(T));
    gaps.push_back(gap);
  }
  const double slope = loglog_slope(ts, gaps);
  CHECK(slope >= -2.5);
  CHECK(slope <= -1.5);
}

TEST_CASE("history overlap with the completed tail is exact") {
  // two-gate decomposition of a 4-dimensional unitary, tau = 2, T = 16
  const Matrix u = haar_unitary(4, 21);
  const Matrix v = haar_unitary(4, 22);
  CircuitSpec c{4, 0, {{{1}, v}, {{1}, Matrix(u * v.adjoint())}}, 16};
  const double measured = history_overlap_squared(c, 2);
  const double exact = double(16 + 1 - 2) / double(16 + 1);
  CHECK(std::abs(measured - exact) <= 1e-10);
  CHECK(std::abs(history_tail_weight(c) - exact) <= 1e-15);
  // the exact value beats the cruder 1 - tau/T accounting
  CHECK(measured > 1.0 - 2.0 / 16.0);
}

TEST_CASE("rescaling multiplies the spectrum linearly") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaarWithIdentity, 2, 3, 8);
  CircuitSpec c{2, 0, {controlled_expander_gate(e, false)}, 4};
  HamiltonianSpec h = build_kitaev(c);
  HamiltonianSpec scaled = rescale_terms(h, 16.0);
  EigResult a = eig_dense(h.dense(), false);
  EigResult b = eig_dense(scaled.dense(), false);
  for (int i = 0; i < a.eigenvalues.size(); ++i)
    CHECK(std::abs(b.eigenvalues(i) - 16.0 * a.eigenvalues(i)) <= 1e-9);
  // ground spaces agree
  Vector hist = build_history_state(c, 1).amplitudes();
  Vector out;
  scaled.apply(hist, out);
  CHECK(out.norm() <= 1e-9);
}

TEST_CASE("circuit validation rejects malformed inputs") {
  CircuitSpec bad = identity_circuit(2, 1);
  bad.padded_length = 0;
  CHECK_THROWS_AS(build_kitaev(bad), ParameterError);
  CircuitSpec wrong{2, 0, {{{1}, Matrix::Identity(3, 3)}}, 2};
  CHECK_THROWS_AS(build_kitaev(wrong), DimensionError);
  CircuitSpec nonunitary{2, 0, {{{1}, 2.0 * Matrix::Identity(2, 2)}}, 2};
  CHECK_THROWS_AS(build_kitaev(nonunitary), NonUnitaryError);
  CHECK_THROWS_AS(build_history_state(identity_circuit(2, 1), 5),
                  ParameterError);
}

TEST_CASE("two-sided construction certifies at D = 2, T = 7") {
  CertifiedEnsemble ce = certified_d3_ensemble(2, 7);
  HamiltonianSpec h = build_hprime_lmr(ce.ensemble, 7);
  REQUIRE(h.dim() == 2304);
  EigResult eig = hermitian_eigs(h.matvec(), h.dim(), 2, EigMode::kDense);
  CHECK(eig.eigenvalues(0) <= 2.0 / 7 + 1e-9);
  CHECK(eig.eigenvalues(1) - eig.eigenvalues(0) > 1e-6);
  RegisteredState g(h.registers(), eig.eigenvectors.col(0), true);
  const double S = entanglement_entropy(g, hprime_left_cut());
  CHECK(S >= 0.9);
}

TEST_CASE("two-sided ground energy decreases with padding") {
  CertifiedEnsemble ce = certified_d3_ensemble(2, 7);
  double prev = std::numeric_limits<double>::infinity();
  for (int T : {3, 7}) {
    HamiltonianSpec h = build_hprime_lmr(ce.ensemble, T);
    EigResult eig = hermitian_eigs(h.matvec(), h.dim(), 1, EigMode::kDense);
    CHECK(eig.eigenvalues(0) <= 2.0 / T + 1e-9);
    CHECK(eig.eigenvalues(0) < prev);
    prev = eig.eigenvalues(0);
  }
}

TEST_CASE("entropy bound endpoints and monotonicity") {
  for (int D : {4, 16, 64}) {
    EntropyBound perfect = entropy_lower_bound(0.0, D);
    CHECK(perfect.bound_bits == std::log2(double(D)));
    EntropyBound useless = entropy_lower_bound(1.0, D);
    CHECK(useless.bound_bits == 0.0);
  }
  // monotone decreasing in the deficit
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.0, 0.01, 0.05, 0.2, 0.5, 1.0}) {
    const double b = entropy_lower_bound(eps, 16).bound_bits;
    CHECK(b <= prev + 1e-12);
    prev = b;
  }
  // monotone increasing in the dimension
  prev = 0.0;
  for (int D : {2, 4, 16, 256}) {
    const double b = entropy_lower_bound(0.05, D).bound_bits;
    CHECK(b >= prev - 1e-12);
    prev = b;
  }
  CHECK_THROWS_AS(entropy_lower_bound(-0.1, 4), ParameterError);
  CHECK_THROWS_AS(entropy_lower_bound(0.1, 1), ParameterError);
}

TEST_CASE("entropy bound is valid on random near-target states") {
  const int D = 16;
  const double eps = 0.05;
  const double bound = entropy_lower_bound(eps, D).bound_bits;
  const Vector phi = max_entangled(D);
  std::vector<Register> regs{{"L", D}, {"R", D}};
  for (std::uint64_t s = 0; s < 500; ++s) {
    // |psi> = sqrt(1-eps)|phi> + sqrt(eps)|chi>, chi orthogonal to phi
    Vector chi = random_state(D * D, 5000 + s);
    chi -= (phi.dot(chi)) * phi;
    chi.normalize();
    Vector psi = std::sqrt(1.0 - eps) * phi + std::sqrt(eps) * chi;
    RegisteredState st(regs, psi, true);
    CHECK(entanglement_entropy(st, {"L"}) >= bound - 1e-9);
  }
}

TEST_CASE("two-clock Hamiltonian at d = 3, D = 4") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaar, 4, 3, 12);
  TwoClock tc = build_two_clock(e);
  for (const auto& t : tc.ham.terms()) CHECK(is_projector(t.op, 1e-9));
  TwoClockReport rep = certify_two_clock(tc);
  CHECK(rep.history_residual <= 1e-10);
  CHECK(std::abs(rep.ground_energy) <= 1e-10);
  CHECK(rep.ground_degeneracy == 1);
  CHECK(rep.schmidt_rank == 12);
  CHECK(std::abs(rep.entropy_bits - std::log2(12.0)) <= 1e-8);
}

TEST_CASE("two-clock middle term ground membership") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaar, 2, 2, 14);
  TwoClock tc = build_two_clock(e);
  const Matrix hm = tc.ham.dense_term("H_M");
  const int d = 2, D = 2, A = 2 * d;
  const auto idx = [D, A](int a, int x, int y, int b) {
    return ((std::int64_t(a) * D + x) * D + y) * A + b;
  };
  // equal-clock maximally entangled ancilla pair is annihilated
  Vector phi_pair = Vector::Zero(tc.ham.dim());
  for (int i = 0; i < d; ++i)
    phi_pair(idx(0 * d + i, 0, 0, 0 * d + i)) = 1.0 / std::sqrt(2.0);
  CHECK((hm * phi_pair).norm() <= 1e-12);
  // opposite-clock pairs are annihilated (the term only penalizes
  // equal-clock sectors)
  Vector mixed = Vector::Zero(tc.ham.dim());
  mixed(idx(1 * d + 0, 0, 0, 0 * d + 1)) = 1.0;
  CHECK((hm * mixed).norm() <= 1e-12);
  // an unbalanced equal-clock diagonal pair is not
  Vector unbalanced = Vector::Zero(tc.ham.dim());
  unbalanced(idx(0 * d + 0, 0, 0, 0 * d + 0)) = 1.0;
  CHECK((hm * unbalanced).norm() > 0.4);
}

TEST_CASE("two-clock ground state is unique for d = 3") {
  for (int D : {2, 8}) {
    UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaar, D, 3, 33);
    TwoClock tc = build_two_clock(e);
    TwoClockReport rep = certify_two_clock(tc);
    CHECK(rep.ground_degeneracy == 1);
    CHECK(rep.gap > 1e-6);
    CHECK(std::abs(rep.entropy_bits - std::log2(3.0 * D)) <= 1e-8);
  }
}

TEST_CASE("two-clock ground degeneracy is D for a single relative unitary") {
  // The zero space is parametrized by matrices C with U_i C U_i^dag
  // independent of i, i.e. the commutant of {U_1^dag U_i}.  With d = 2
  // that is one generic unitary, whose commutant has dimension D.
  for (int D : {2, 4}) {
    UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaar, D, 2, 33);
    TwoClock tc = build_two_clock(e);
    EigResult eig =
        hermitian_eigs(tc.ham.matvec(), tc.ham.dim(), D + 1, EigMode::kDense);
    int zeros = 0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i)
      if (std::abs(eig.eigenvalues(i)) <= 1e-10) ++zeros;
    CHECK(zeros == D);
  }
}

TEST_CASE("circuit JSON round-trip") {
  UnitaryEnsemble e = build_ensemble(EnsembleKind::kHaarWithIdentity, 2, 3, 2);
  CircuitSpec c{2, 1, {controlled_expander_gate(e, false)}, 8};
  const Json j = circuit_to_json(c);
  CircuitSpec back = circuit_from_json(Json::parse(j.dump()));
  CHECK(back.D == c.D);
  CHECK(back.scratch_qubits == c.scratch_qubits);
  CHECK(back.padded_length == c.padded_length);
  REQUIRE(back.gates.size() == c.gates.size());
  CHECK(back.gates[0].support == c.gates[0].support);
  CHECK(max_abs(back.gates[0].op - c.gates[0].op) == 0.0);
}

TEST_CASE("log-log slope fit sanity") {
  std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  CHECK(std::abs(loglog_slope(x, y) + 2.0) <= 1e-12);
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), ParameterError);
  CHECK_THROWS_AS(loglog_slope({1.0, -1.0}, {1.0, 1.0}), ParameterError);
}
