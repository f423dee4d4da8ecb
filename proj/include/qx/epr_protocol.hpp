#pragma once

// State-vector simulation of the constant-communication EPR tests: the
// basic one-ancilla protocol, the two-ancilla pre-shared variant, the
// shared-randomness variant, iterated products, and closed-form resource
// accounting.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "qx/expander.hpp"
#include "qx/registered_state.hpp"

namespace qx {

struct ResourceTuple {
  int qubits_sent = 0;
  int cbits_sent = 0;
  int epr_consumed = 0;
  int rbits_used = 0;
};

enum class ProtocolVariant {
  kBasic,
  kIterated,
  kSharedRandomness,
  kTwoAncilla,
  kClassicalAccounting,
  kBasicEfficient,
};

inline std::string to_string(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::kBasic: return "basic";
    case ProtocolVariant::kIterated: return "iterated";
    case ProtocolVariant::kSharedRandomness: return "shared-randomness";
    case ProtocolVariant::kTwoAncilla: return "two-ancilla";
    case ProtocolVariant::kClassicalAccounting: return "classical-accounting";
    case ProtocolVariant::kBasicEfficient: return "basic-efficient";
  }
  return "?";
}

struct ProtocolTranscript {
  ProtocolVariant variant = ProtocolVariant::kBasic;
  int D = 0;
  int d = 0;
  int iterations = 1;
  double accept_prob = 0.0;
  std::optional<Vector> post_state_accept;  // on C^D (x) C^D, normalized
  ResourceTuple resources;
};

inline int ceil_log2(int d) {
  int bits = 0;
  while ((1 << bits) < d) ++bits;
  return bits;
}

namespace detail {

inline void check_protocol_input(const UnitaryEnsemble& e, const Vector& psi) {
  if (e.d == 0 || e.unitaries.empty())
    throw EnsembleError("protocol needs a non-empty ensemble");
  if (psi.size() != std::int64_t(e.D) * e.D)
    throw DimensionError("protocol input must have two registers of dim D");
}

inline void finish_transcript(ProtocolTranscript& t, const Vector& m_psi) {
  t.accept_prob = m_psi.squaredNorm();
  if (t.accept_prob > 0.0)
    t.post_state_accept = m_psi / m_psi.norm();
}

}  // namespace detail

// Steps 1-6 of the one-way protocol: ancilla in uniform superposition,
// controlled-W on (a, L), controlled-W^* on (a, R), then projection of
// the ancilla back onto the uniform superposition.  Algebraically the
// accepted branch is M|psi> with M = (1/d) sum U_i (x) U_i^*.
inline ProtocolTranscript run_basic(const UnitaryEnsemble& e,
                                    const Vector& psi) {
  detail::check_protocol_input(e, psi);
  ProtocolTranscript t;
  t.variant = ProtocolVariant::kBasic;
  t.D = e.D;
  t.d = e.d;
  t.resources.qubits_sent = ceil_log2(e.d);
  detail::finish_transcript(t, apply_superop(e, psi));
  return t;
}

// Fig. 2b variant: pre-shared |phi_d> on (a_L, a_R), W on (a_L, L), W^*
// on (a_R, R), projection of the ancilla pair onto |phi_d>.  Simulated
// literally on the four-register state vector.
inline ProtocolTranscript run_two_ancilla(const UnitaryEnsemble& e,
                                          const Vector& psi) {
  detail::check_protocol_input(e, psi);
  const int D = e.D, d = e.d;
  std::vector<Register> regs{{"aL", d}, {"L", D}, {"R", D}, {"aR", d}};
  const std::int64_t full = std::int64_t(d) * D * D * d;
  Vector state = Vector::Zero(full);
  // |phi_d>_{aL,aR} (x) psi_{L,R}
  const double anc = 1.0 / std::sqrt(double(d));
  for (int i = 0; i < d; ++i)
    for (int x = 0; x < D; ++x)
      for (int y = 0; y < D; ++y)
        state(((std::int64_t(i) * D + x) * D + y) * d + i) =
            anc * psi(std::int64_t(x) * D + y);
  // W on (aL, L): |i>|x> -> |i> U_i|x>;  W^* on (aR, R).
  Vector next = Vector::Zero(full);
  for (int i = 0; i < d; ++i) {
    const Matrix& u = e.unitaries[i];
    for (int j = 0; j < d; ++j) {
      const Matrix uc = e.unitaries[j].conjugate();
      for (int x = 0; x < D; ++x)
        for (int y = 0; y < D; ++y) {
          Complex acc = 0.0;
          for (int xp = 0; xp < D; ++xp)
            for (int yp = 0; yp < D; ++yp)
              acc += u(x, xp) * uc(y, yp) *
                     state(((std::int64_t(i) * D + xp) * D + yp) * d + j);
          next(((std::int64_t(i) * D + x) * D + y) * d + j) = acc;
        }
    }
  }
  // Project (aL, aR) onto |phi_d>; accepted branch on (L, R).
  Vector accepted = Vector::Zero(std::int64_t(D) * D);
  for (int x = 0; x < D; ++x)
    for (int y = 0; y < D; ++y) {
      Complex acc = 0.0;
      for (int i = 0; i < d; ++i)
        acc += anc * next(((std::int64_t(i) * D + x) * D + y) * d + i);
      accepted(std::int64_t(x) * D + y) = acc;
    }
  ProtocolTranscript t;
  t.variant = ProtocolVariant::kTwoAncilla;
  t.D = D;
  t.d = d;
  t.resources.epr_consumed = 1;  // one pre-shared pair of dimension d
  detail::finish_transcript(t, accepted);
  return t;
}

// Shared-randomness variant: for r in {1..4} run the basic protocol with
// the pair {I, U_r}; accept probability is the average over r.  Requires
// d = 8 with members 5-8 the adjoints of members 1-4.
inline ProtocolTranscript run_shared_randomness(const UnitaryEnsemble& e,
                                                const Vector& psi) {
  detail::check_protocol_input(e, psi);
  if (e.d != 8) throw EnsembleError("shared-randomness variant needs d = 8");
  for (int r = 0; r < 4; ++r)
    if (max_abs(e.unitaries[r + 4] - e.unitaries[r].adjoint()) > 1e-12)
      throw EnsembleError("members 5-8 must be adjoints of members 1-4");
  ProtocolTranscript t;
  t.variant = ProtocolVariant::kSharedRandomness;
  t.D = e.D;
  t.d = e.d;
  t.resources = {1, 0, 0, 2};
  double accept = 0.0;
  for (int r = 0; r < 4; ++r) {
    UnitaryEnsemble pair = explicit_ensemble(
        {Matrix::Identity(e.D, e.D), e.unitaries[r]});
    accept += apply_superop(pair, psi).squaredNorm();
  }
  t.accept_prob = accept / 4.0;
  return t;
}

// Averaged effect of the shared-randomness variant,
// (1/4) sum_r M_r^dag M_r with M_r = (I + U_r (x) U_r^*)/2.
inline Matrix shared_randomness_effect(const UnitaryEnsemble& e) {
  if (e.d != 8) throw EnsembleError("shared-randomness variant needs d = 8");
  const std::int64_t dim = std::int64_t(e.D) * e.D;
  Matrix eff = Matrix::Zero(dim, dim);
  for (int r = 0; r < 4; ++r) {
    Matrix mr = (Matrix::Identity(dim, dim) +
                 kron(e.unitaries[r], e.unitaries[r].conjugate())) /
                2.0;
    eff += mr.adjoint() * mr;
  }
  return eff / 4.0;
}

inline ProtocolTranscript run_iterated(const UnitaryEnsemble& e, int k,
                                       const Vector& psi, int cap = 512) {
  const UnitaryEnsemble prod = product_ensemble(e, k, cap);
  ProtocolTranscript t = run_basic(prod, psi);
  t.variant = ProtocolVariant::kIterated;
  t.d = e.d;
  t.iterations = k;
  t.resources.qubits_sent = k * ceil_log2(e.d);
  return t;
}

// Closed-form Theorem 1 / Table 1 accounting with the o(1) terms set to
// zero and ceiling rounding; a lower-envelope count, not a simulation.
// The efficient bullet's universal constant C is a required caller input.
inline ResourceTuple resource_cost(ProtocolVariant variant, double epsilon,
                                   std::optional<double> efficiency_c = {}) {
  if (variant == ProtocolVariant::kSharedRandomness) return {1, 0, 0, 2};
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("epsilon must lie in (0, 1)");
  const double log_inv = std::log2(1.0 / epsilon);
  ResourceTuple r;
  switch (variant) {
    case ProtocolVariant::kBasic:
      r.qubits_sent = int(std::ceil(2.0 * log_inv));
      break;
    case ProtocolVariant::kBasicEfficient:
      if (!efficiency_c || *efficiency_c <= 0.0)
        throw ParameterError(
            "efficient variant needs the universal constant C > 0");
      r.qubits_sent = int(std::ceil(*efficiency_c * log_inv));
      break;
    case ProtocolVariant::kClassicalAccounting:
      r.cbits_sent = int(std::ceil(8.0 * log_inv));
      r.epr_consumed = r.cbits_sent;
      break;
    case ProtocolVariant::kIterated:
      r.qubits_sent = int(std::ceil(2.0 * log_inv));
      break;
    default:
      throw ParameterError("no closed-form cost for this variant");
  }
  return r;
}

// Seeded Bernoulli sample of the accept outcome, for transcript realism
// only; the probabilities themselves are exact projections.
inline bool sample_outcome(double accept_prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return unit(rng) < accept_prob;
}

// Post-measurement state on reject: (I - M^dag M)^{1/2} psi, normalized.
inline std::optional<Vector> reject_state(const UnitaryEnsemble& e,
                                          const Vector& psi) {
  detail::check_protocol_input(e, psi);
  const Matrix m = superop_dense(e);
  const std::int64_t dim = m.rows();
  const Matrix effect = Matrix::Identity(dim, dim) - m.adjoint() * m;
  EigResult es = eig_dense(effect);
  Matrix sqrt_eff = Matrix::Zero(dim, dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const double ev = std::max(0.0, es.eigenvalues(i));
    sqrt_eff += std::sqrt(ev) * es.eigenvectors.col(i) *
                es.eigenvectors.col(i).adjoint();
  }
  Vector out = sqrt_eff * psi;
  const double n = out.norm();
  // reject probability n^2 below 1e-12 is round-off from the eigenvalue
  // square root, not a physical branch
  if (n < 1e-6) return std::nullopt;
  return out / n;
}

}  // namespace qx
