#pragma once

// Circuit-to-Hamiltonian constructions: the clock-register propagation
// and initialization Hamiltonian with identity padding, history states,
// the rescaled two-sided construction with the middle coupling, the
// fidelity-to-entropy lower bound, and the two-clock protocol
// Hamiltonian with its history ground state.

#include <cmath>
#include <cstdint>
#include <vector>

#include "qx/arealaw.hpp"
#include "qx/expander.hpp"
#include "qx/hamiltonian.hpp"

namespace qx {

// A gate acts on a subset of the non-clock registers
// (0 = control qutrit, 1 = data, 2.. = scratch qubits).
struct CircuitGate {
  std::vector<int> support;
  Matrix op;
};

struct CircuitSpec {
  int D = 2;               // data dimension
  int scratch_qubits = 0;
  std::vector<CircuitGate> gates;  // V_1 .. V_tau
  int padded_length = 1;   // T >= tau; gates beyond tau are identity

  int tau() const { return int(gates.size()); }
  int T() const { return padded_length; }
};

inline std::vector<Register> circuit_registers(const CircuitSpec& c) {
  std::vector<Register> regs{{"clock", c.T() + 1}, {"control", 3},
                             {"data", c.D}};
  for (int i = 0; i < c.scratch_qubits; ++i)
    regs.push_back({"q" + std::to_string(i + 1), 2});
  return regs;
}

namespace detail {

inline void validate_circuit(const CircuitSpec& c) {
  if (c.D < 1) throw DimensionError("data dimension must be >= 1");
  if (c.scratch_qubits < 0) throw ParameterError("negative scratch count");
  if (c.padded_length < c.tau() || c.padded_length < 1)
    throw ParameterError("padded length must satisfy T >= tau, T >= 1");
  const std::vector<Register> regs = circuit_registers(c);
  for (const auto& g : c.gates) {
    std::int64_t sdim = 1;
    for (int s : g.support) {
      if (s < 0 || s + 1 >= int(regs.size()))
        throw RegisterNameError("gate support index out of range");
      sdim *= regs[s + 1].dim;
    }
    if (g.op.rows() != sdim || g.op.cols() != sdim)
      throw DimensionError("gate matrix does not match its support");
    if (!is_unitary(g.op, 1e-12))
      throw NonUnitaryError("circuit gate is not unitary");
  }
}

// Apply op in place on the given support of a multi-register vector.
inline void apply_on_support(const std::vector<Register>& regs,
                             const std::vector<int>& support, const Matrix& op,
                             Vector& state) {
  const int n = int(regs.size());
  std::vector<std::int64_t> strides(n, 1);
  for (int k = n - 2; k >= 0; --k) strides[k] = strides[k + 1] * regs[k + 1].dim;
  const std::int64_t sdim = op.rows();
  std::vector<std::int64_t> offsets(sdim, 0);
  std::vector<int> digits(support.size(), 0);
  for (std::int64_t i = 0; i < sdim; ++i) {
    std::int64_t off = 0;
    for (std::size_t k = 0; k < support.size(); ++k)
      off += std::int64_t(digits[k]) * strides[support[k]];
    offsets[i] = off;
    for (int k = int(support.size()) - 1; k >= 0; --k) {
      if (++digits[k] < regs[support[k]].dim) break;
      digits[k] = 0;
    }
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (std::find(support.begin(), support.end(), i) == support.end())
      rest.push_back(i);
  std::vector<int> rdigits(rest.size(), 0);
  const std::int64_t rest_count = state.size() / sdim;
  Vector sub(sdim);
  for (std::int64_t r = 0; r < rest_count; ++r) {
    std::int64_t base = 0;
    for (std::size_t k = 0; k < rest.size(); ++k)
      base += std::int64_t(rdigits[k]) * strides[rest[k]];
    for (std::int64_t s = 0; s < sdim; ++s) sub(s) = state(base + offsets[s]);
    sub = (op * sub).eval();
    for (std::int64_t s = 0; s < sdim; ++s) state(base + offsets[s]) = sub(s);
    for (int k = int(rest.size()) - 1; k >= 0; --k) {
      if (++rdigits[k] < regs[rest[k]].dim) break;
      rdigits[k] = 0;
    }
  }
}

inline Matrix clock_unit(int levels, int a, int b) {
  Matrix e = Matrix::Zero(levels, levels);
  e(a, b) = 1.0;
  return e;
}

}  // namespace detail

// H = H_prop + H_init on (clock, control, data, scratch...).  The clock
// is one explicit (T+1)-level register; on the legal clock subspace of a
// unary-qubit clock the spectra coincide, so no clock-validity penalty
// terms are needed.  Propagation terms are named "prop", initialization
// terms "init".
inline HamiltonianSpec build_kitaev(const CircuitSpec& c) {
  detail::validate_circuit(c);
  const int T = c.T();
  HamiltonianSpec spec(circuit_registers(c));

  for (int t = 1; t <= T; ++t) {
    const Matrix diag = detail::clock_unit(T + 1, t - 1, t - 1) +
                        detail::clock_unit(T + 1, t, t);
    if (t <= c.tau()) {
      const CircuitGate& g = c.gates[t - 1];
      const std::int64_t gdim = g.op.rows();
      Matrix op =
          0.5 * (kron(diag, Matrix::Identity(gdim, gdim)) -
                 kron(detail::clock_unit(T + 1, t - 1, t), g.op.adjoint()) -
                 kron(detail::clock_unit(T + 1, t, t - 1), g.op));
      std::vector<int> support{0};
      for (int s : g.support) support.push_back(s + 1);
      spec.add_term({"prop", support, std::move(op), 1.0, true});
    } else {
      Matrix op = 0.5 * (diag - detail::clock_unit(T + 1, t - 1, t) -
                         detail::clock_unit(T + 1, t, t - 1));
      spec.add_term({"prop", {0}, std::move(op), 1.0, true});
    }
  }

  Vector alpha3 = Vector::Constant(3, 1.0 / std::sqrt(3.0));
  Matrix init_op = kron(detail::clock_unit(T + 1, 0, 0),
                        Matrix(Matrix::Identity(3, 3) -
                               alpha3 * alpha3.adjoint()));
  spec.add_term({"init", {0, 1}, std::move(init_op), 1.0, true});
  for (int i = 0; i < c.scratch_qubits; ++i) {
    Matrix one = Matrix::Zero(2, 2);
    one(1, 1) = 1.0;
    spec.add_term({"init",
                   {0, 3 + i},
                   kron(detail::clock_unit(T + 1, 0, 0), one),
                   1.0,
                   true});
  }
  return spec;
}

// (T+1)^{-1/2} sum_t |t> (x) V_t...V_1 [alpha_3 (x) |x> (x) |0...0>].
inline RegisteredState build_history_state(const CircuitSpec& c, int x) {
  detail::validate_circuit(c);
  if (x < 0 || x >= c.D) throw ParameterError("input index out of range");
  const std::vector<Register> regs = circuit_registers(c);
  std::vector<Register> nc(regs.begin() + 1, regs.end());
  std::int64_t ncdim = 1;
  for (const auto& r : nc) ncdim *= r.dim;
  const std::int64_t scratch_dim = ncdim / (3 * c.D);

  Vector slice = Vector::Zero(ncdim);
  for (int i = 0; i < 3; ++i)
    slice((std::int64_t(i) * c.D + x) * scratch_dim) = 1.0 / std::sqrt(3.0);

  const int T = c.T();
  Vector amps = Vector::Zero(std::int64_t(T + 1) * ncdim);
  const double w = 1.0 / std::sqrt(double(T + 1));
  amps.segment(0, ncdim) = w * slice;
  for (int t = 1; t <= T; ++t) {
    if (t <= c.tau())
      detail::apply_on_support(nc, c.gates[t - 1].support, c.gates[t - 1].op,
                               slice);
    amps.segment(std::int64_t(t) * ncdim, ncdim) = w * slice;
  }
  return RegisteredState(regs, std::move(amps));
}

// Squared overlap of the history state with |Phi_x> (x) |w>, where
// |Phi_x> is the completed computation and |w> the uniform clock tail
// t = tau..T.  Exactly (T + 1 - tau) / (T + 1), measured here.
inline double history_overlap_squared(const CircuitSpec& c, int x) {
  const RegisteredState hist = build_history_state(c, x);
  const std::vector<Register> regs = circuit_registers(c);
  std::vector<Register> nc(regs.begin() + 1, regs.end());
  const std::int64_t ncdim = hist.dim() / (c.T() + 1);
  // completed slice, from the last clock position
  Vector phi = hist.amplitudes().segment(std::int64_t(c.T()) * ncdim, ncdim);
  phi.normalize();
  Complex acc = 0.0;
  const double wt = 1.0 / std::sqrt(double(c.T() + 1 - c.tau()));
  for (int t = c.tau(); t <= c.T(); ++t)
    acc += wt * phi.dot(hist.amplitudes().segment(std::int64_t(t) * ncdim, ncdim));
  return std::norm(acc);
}

inline double history_tail_weight(const CircuitSpec& c) {
  return double(c.T() + 1 - c.tau()) / double(c.T() + 1);
}

inline HamiltonianSpec rescale_terms(const HamiltonianSpec& spec,
                                     double factor) {
  HamiltonianSpec out = spec;
  out.scale_all(factor);
  return out;
}

inline CircuitGate controlled_expander_gate(const UnitaryEnsemble& e,
                                            bool conjugated) {
  if (e.d != 3) throw EnsembleError("controlled gate needs a d = 3 ensemble");
  Matrix w = Matrix::Zero(3 * e.D, 3 * e.D);
  for (int i = 0; i < 3; ++i)
    w.block(i * e.D, i * e.D, e.D, e.D) =
        conjugated ? e.unitaries[i].conjugate() : e.unitaries[i];
  return {{0, 1}, std::move(w)};
}

// H' = T^2 (H_L^Kit + H_R^Kit) + H_M on registers
// (kL, aL, L, R, aR, kR); the middle term couples the two control
// qutrits, the side terms are single-gate clock constructions padded to
// length T.
inline HamiltonianSpec build_hprime_lmr(const UnitaryEnsemble& e, int T) {
  if (!e.has_identity_first())
    throw EnsembleError("build_hprime_lmr needs U_1 = I");
  const int D = e.D;
  std::vector<Register> regs{{"kL", T + 1}, {"aL", 3}, {"L", D},
                             {"R", D},      {"aR", 3}, {"kR", T + 1}};
  HamiltonianSpec spec(regs);

  const double t2 = double(T) * double(T);
  const auto port = [&spec, t2](const HamiltonianSpec& side,
                                const std::array<int, 3>& map,
                                const std::string& prefix) {
    for (const auto& t : side.terms()) {
      LocalTerm nt = t;
      nt.name = prefix + t.name;
      for (auto& s : nt.support) s = map[s];
      nt.norm_scale *= t2;
      spec.add_term(std::move(nt));
    }
  };
  CircuitSpec left{D, 0, {controlled_expander_gate(e, false)}, T};
  CircuitSpec right{D, 0, {controlled_expander_gate(e, true)}, T};
  port(build_kitaev(left), {0, 1, 2}, "L_");
  port(build_kitaev(right), {5, 4, 3}, "R_");
  spec.add_term({"H_M", {1, 4}, h4_middle_term(), 1.0, true});
  return spec;
}

inline std::vector<std::string> hprime_left_cut() { return {"kL", "aL", "L"}; }

// Lower bound on the entanglement entropy (bits) of any state whose
// overlap with the maximally entangled state of dimension D on the cut
// is at least 1 - eps: max over kappa in (1, D] of
// (1 - eps / (1 - kappa^{-1/2})) log2(D / kappa), clamped at 0.
struct EntropyBound {
  double fidelity_deficit = 0.0;
  int D = 2;
  double kappa = 1.0;
  double bound_bits = 0.0;
};

inline EntropyBound entropy_lower_bound(double eps, int D) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw ParameterError("fidelity deficit must lie in [0, 1]");
  if (D < 2) throw ParameterError("dimension must be >= 2");
  EntropyBound out;
  out.fidelity_deficit = eps;
  out.D = D;
  if (eps == 0.0) {  // kappa -> 1 limit: the state is exactly maximally
    out.kappa = 1.0; // entangled
    out.bound_bits = std::log2(double(D));
    return out;
  }
  const auto value = [eps, D](double kappa) {
    const double denom = 1.0 - 1.0 / std::sqrt(kappa);
    if (denom <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - eps / denom) * std::log2(double(D) / kappa);
  };
  // 256-point logarithmic scan, then golden-section refinement
  const int grid = 256;
  double best_kappa = double(D), best = 0.0;
  const double log_hi = std::log(double(D));
  for (int i = 1; i <= grid; ++i) {
    const double kappa = std::exp(log_hi * double(i) / grid);
    const double v = value(kappa);
    if (v > best) { best = v; best_kappa = kappa; }
  }
  double lo = std::max(1.0, best_kappa * std::exp(-log_hi / grid));
  double hi = std::min(double(D), best_kappa * std::exp(log_hi / grid));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  while (hi - lo > 1e-12 && std::abs(f1 - f2) > 0.0) {
    if (f1 < f2) {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + phi * (hi - lo); f2 = value(x2);
    } else {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - phi * (hi - lo); f1 = value(x1);
    }
    if (std::max(f1, f2) - best <= 1e-10 && hi - lo < 1e-10) break;
  }
  if (f1 > best) { best = f1; best_kappa = x1; }
  if (f2 > best) { best = f2; best_kappa = x2; }
  out.kappa = best_kappa;
  out.bound_bits = std::max(0.0, best);
  return out;
}

// Two-clock protocol Hamiltonian on (A_L, L, R, A_R) with A = clock bit
// (x) ancilla index, basis |s, i> at index s*d + i.
struct TwoClock {
  HamiltonianSpec ham;
  RegisteredState history;
};

inline std::vector<Register> two_clock_registers(int d, int D) {
  return {{"AL", 2 * d}, {"L", D}, {"R", D}, {"AR", 2 * d}};
}

inline TwoClock build_two_clock(const UnitaryEnsemble& e) {
  const int d = e.d, D = e.D;
  HamiltonianSpec spec(two_clock_registers(d, D));

  // within each equal-clock sector, allow only the maximally entangled
  // ancilla pair: sum_s [P_s (x) P_s - |phi_s><phi_s|]
  Matrix hm = Matrix::Zero(4 * d * d, 4 * d * d);
  for (int s = 0; s < 2; ++s) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const std::int64_t idx = std::int64_t(s * d + i) * 2 * d + (s * d + j);
        hm(idx, idx) += 1.0;
      }
    Vector phi = Vector::Zero(4 * d * d);
    for (int i = 0; i < d; ++i)
      phi(std::int64_t(s * d + i) * 2 * d + (s * d + i)) =
          1.0 / std::sqrt(double(d));
    hm -= phi * phi.adjoint();
  }
  spec.add_term({"H_M", {0, 3}, std::move(hm), 1.0, true});

  const auto side = [d, D](const std::vector<Matrix>& u) {
    const std::int64_t n = std::int64_t(2 * d) * D;
    Matrix h = Matrix::Identity(n, n);
    for (int i = 0; i < d; ++i) {
      // |1,i><0,i| (x) U_i and its adjoint
      h.block(std::int64_t(d + i) * D, std::int64_t(i) * D, D, D) -= 0.5 * u[i];
      h.block(std::int64_t(i) * D, std::int64_t(d + i) * D, D, D) -=
          0.5 * u[i].adjoint();
    }
    return (h - 0.5 * Matrix::Identity(n, n)).eval();
  };
  // 0.5 [I - sum_i (|1i><0i| (x) U_i + h.c.)]
  std::vector<Matrix> left(e.unitaries), right;
  for (const auto& u : e.unitaries) right.push_back(u.conjugate());
  spec.add_term({"H_L", {0, 1}, side(left), 1.0, true});
  spec.add_term({"H_R", {3, 2}, side(right), 1.0, true});

  // (1/(2 sqrt d)) sum_i (|0,i> + |1,i> U_i)(|0,i> + |1,i> U_i^*) |phi_D>
  Vector amps = Vector::Zero(spec.dim());
  const double scale = 1.0 / (2.0 * std::sqrt(double(d) * double(D)));
  for (int i = 0; i < d; ++i)
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp) {
        Matrix m = Matrix::Identity(D, D);
        if (s == 1 && sp == 0) m = e.unitaries[i];
        if (s == 0 && sp == 1) m = e.unitaries[i].adjoint();
        for (int x = 0; x < D; ++x)
          for (int y = 0; y < D; ++y)
            amps(((std::int64_t(s * d + i) * D + x) * D + y) * 2 * d +
                 (sp * d + i)) = scale * m(x, y);
      }
  RegisteredState history(spec.registers(), std::move(amps));
  return {std::move(spec), std::move(history)};
}

struct TwoClockReport {
  double ground_energy = 0.0;
  double gap = 0.0;
  int ground_degeneracy = 1;
  double history_residual = 0.0;
  int schmidt_rank = 0;
  double entropy_bits = 0.0;
};

inline TwoClockReport certify_two_clock(const TwoClock& tc,
                                        EigMode mode = EigMode::kDense) {
  TwoClockReport rep;
  Vector hpsi;
  tc.ham.apply(tc.history.amplitudes(), hpsi);
  rep.history_residual = hpsi.norm();
  EigResult eig = hermitian_eigs(tc.ham.matvec(), tc.ham.dim(), 3, mode);
  rep.ground_energy = eig.eigenvalues(0);
  rep.gap = eig.eigenvalues(1) - eig.eigenvalues(0);
  const double tol = degeneracy_tol(tc.ham.norm_upper_bound());
  rep.ground_degeneracy = 1;
  for (int i = 1; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) - eig.eigenvalues(0) <= tol) ++rep.ground_degeneracy;
  const SchmidtDecomposition sd = schmidt(tc.history, {"AL", "L"});
  rep.schmidt_rank = 0;
  for (int i = 0; i < sd.coefficients.size(); ++i)
    if (sd.coefficients(i) > 1e-8) ++rep.schmidt_rank;
  rep.entropy_bits = entropy_bits(sd.coefficients);
  return rep;
}

// Least-squares slope of log(y) against log(x), for gap-scaling fits.
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ParameterError("slope fit needs matching samples, at least two");
  const int n = int(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0))
      throw ParameterError("slope fit needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qx
