#pragma once

// Normalized state vectors over an ordered list of named registers, with
// register permutation, partial trace, Schmidt decomposition and
// entanglement entropy.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qx/linalg.hpp"

namespace qx {

struct Register {
  std::string name;
  int dim = 0;
};

// Schmidt data across a bipartite cut.  Coefficients are non-increasing,
// sum of squares 1; columns of left/right vectors are orthonormal.
struct SchmidtDecomposition {
  std::vector<std::string> left_names;
  std::vector<std::string> right_names;
  Eigen::VectorXd coefficients;
  Matrix left_vectors;
  Matrix right_vectors;
};

class RegisteredState {
 public:
  RegisteredState(std::vector<Register> registers, Vector amplitudes,
                  bool renormalize = false)
      : regs_(std::move(registers)), amps_(std::move(amplitudes)) {
    std::int64_t prod = 1;
    for (const auto& r : regs_) {
      if (r.dim < 1) throw DimensionError("register dimension must be >= 1");
      prod *= r.dim;
      if (prod > kDimensionCap)
        throw DimensionCapError("state dimension exceeds cap");
    }
    if (prod != amps_.size())
      throw DimensionError("amplitude length does not match register dims");
    const double norm = amps_.norm();
    if (renormalize) {
      if (norm == 0.0) throw ParameterError("cannot normalize zero vector");
      amps_ /= norm;
    } else if (std::abs(norm - 1.0) > 1e-10) {
      throw ParameterError("state vector is not normalized");
    }
  }

  const std::vector<Register>& registers() const { return regs_; }
  const Vector& amplitudes() const { return amps_; }
  std::int64_t dim() const { return amps_.size(); }

  int register_index(const std::string& name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i)
      if (regs_[i].name == name) return int(i);
    throw RegisterNameError("unknown register: " + name);
  }

  // Reorders registers to `order` (a permutation of all register names).
  RegisteredState permuted(const std::vector<std::string>& order) const {
    if (order.size() != regs_.size())
      throw RegisterNameError("permutation must cover all registers");
    std::vector<int> perm;  // perm[k] = old index of new position k
    perm.reserve(order.size());
    for (const auto& name : order) perm.push_back(register_index(name));
    std::vector<bool> used(regs_.size(), false);
    for (int p : perm) {
      if (used[p]) throw RegisterNameError("duplicate register in permutation");
      used[p] = true;
    }

    const int n = int(regs_.size());
    std::vector<std::int64_t> old_stride(n, 1);
    for (int k = n - 2; k >= 0; --k)
      old_stride[k] = old_stride[k + 1] * regs_[k + 1].dim;

    std::vector<Register> new_regs;
    new_regs.reserve(n);
    for (int p : perm) new_regs.push_back(regs_[p]);

    Vector out(amps_.size());
    std::vector<int> digits(n, 0);  // multi-index in the *new* order
    for (std::int64_t idx = 0; idx < amps_.size(); ++idx) {
      std::int64_t src = 0;
      for (int k = 0; k < n; ++k) src += digits[k] * old_stride[perm[k]];
      out(idx) = amps_(src);
      for (int k = n - 1; k >= 0; --k) {
        if (++digits[k] < new_regs[k].dim) break;
        digits[k] = 0;
      }
    }
    return RegisteredState(std::move(new_regs), std::move(out));
  }

  // Splits register names into (kept-in-state-order, rest-in-state-order).
  std::pair<std::vector<std::string>, std::vector<std::string>> split(
      const std::vector<std::string>& keep) const {
    for (const auto& k : keep) (void)register_index(k);
    std::vector<std::string> left, right;
    for (const auto& r : regs_) {
      if (std::find(keep.begin(), keep.end(), r.name) != keep.end())
        left.push_back(r.name);
      else
        right.push_back(r.name);
    }
    return {left, right};
  }

  // Reshape into a (dim of kept) x (dim of rest) matrix, kept registers as
  // rows in their state order.
  Matrix cut_matrix(const std::vector<std::string>& keep) const {
    auto [left, right] = split(keep);
    std::vector<std::string> order = left;
    order.insert(order.end(), right.begin(), right.end());
    const RegisteredState p = permuted(order);
    std::int64_t ldim = 1;
    for (const auto& name : left) ldim *= regs_[register_index(name)].dim;
    const std::int64_t rdim = dim() / ldim;
    return Eigen::Map<const Matrix>(p.amplitudes().data(), rdim, ldim)
        .transpose();
  }

 private:
  std::vector<Register> regs_;
  Vector amps_;
};

// Reduced density operator on the kept registers (in state order).
inline Matrix partial_trace(const RegisteredState& state,
                            const std::vector<std::string>& keep) {
  const Matrix m = state.cut_matrix(keep);
  return m * m.adjoint();
}

inline SchmidtDecomposition schmidt(const RegisteredState& state,
                                    const std::vector<std::string>& left) {
  auto [lnames, rnames] = state.split(left);
  const Matrix m = state.cut_matrix(left);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.left_names = lnames;
  out.right_names = rnames;
  out.coefficients = svd.singularValues();
  out.left_vectors = svd.matrixU();
  // m = U S V^dag, psi = sum_i s_i u_i (x) conj(v_i).
  out.right_vectors = svd.matrixV().conjugate();
  return out;
}

// Von Neumann entropy in bits from Schmidt coefficients; coefficients
// below 1e-12 are dropped (0 log 0 := 0).
inline double entropy_bits(const Eigen::VectorXd& schmidt_coeffs) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < schmidt_coeffs.size(); ++i) {
    const double c = schmidt_coeffs(i);
    if (c < 1e-12) continue;
    const double p = c * c;
    s -= p * std::log2(p);
  }
  return s;
}

inline double entanglement_entropy(const RegisteredState& state,
                                   const std::vector<std::string>& left) {
  return entropy_bits(schmidt(state, left).coefficients);
}

}  // namespace qx
