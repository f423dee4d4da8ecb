#pragma once

// Sums of named local Hermitian terms over registered tensor factors.
// Terms are stored on their support only; application and dense
// materialization embed them by index arithmetic, never via full
// Kronecker products with identities.

#include <string>
#include <vector>

#include "qx/eigs.hpp"
#include "qx/registered_state.hpp"

namespace qx {

struct LocalTerm {
  std::string name;
  std::vector<int> support;  // register indices, in the term's row ordering
  Matrix op;                 // Hermitian, on the tensor product of supports
  double norm_scale = 1.0;
  bool projector = false;    // flagged terms must satisfy ||P^2 - P|| <= 1e-9
};

class HamiltonianSpec {
 public:
  explicit HamiltonianSpec(std::vector<Register> registers)
      : regs_(std::move(registers)) {
    const int n = int(regs_.size());
    strides_.assign(n, 1);
    for (int k = n - 2; k >= 0; --k)
      strides_[k] = strides_[k + 1] * regs_[k + 1].dim;
    dim_ = (n > 0) ? strides_[0] * regs_[0].dim : 1;
    if (dim_ > kDimensionCap)
      throw DimensionCapError("hamiltonian dimension exceeds cap");
  }

  void add_term(LocalTerm term) {
    std::int64_t sdim = 1;
    for (int s : term.support) {
      if (s < 0 || s >= int(regs_.size()))
        throw RegisterNameError("term support index out of range");
      sdim *= regs_[s].dim;
    }
    if (term.op.rows() != sdim || term.op.cols() != sdim)
      throw DimensionError("term matrix does not match its support");
    if (!is_hermitian(term.op, 1e-10))
      throw ParameterError("term '" + term.name + "' is not Hermitian");
    if (term.projector && !is_projector(term.op, 1e-9))
      throw ProjectorError("term '" + term.name + "' is not a projector");
    if (term.norm_scale <= 0.0)
      throw ParameterError("norm_scale must be positive");
    terms_.push_back(std::move(term));
  }

  const std::vector<Register>& registers() const { return regs_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  std::int64_t dim() const { return dim_; }

  int register_index(const std::string& name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i)
      if (regs_[i].name == name) return int(i);
    throw RegisterNameError("unknown register: " + name);
  }

  // y = H x, accumulating each scaled term over its support.
  void apply(const Vector& x, Vector& y) const {
    y = Vector::Zero(dim_);
    Vector sub, mapped;
    for (const auto& t : terms_) apply_term(t, x, y, sub, mapped);
  }

  MatVec matvec() const {
    return [this](const Vector& x, Vector& y) { apply(x, y); };
  }

  Matrix dense() const {
    if (dim_ > 4096)
      throw DimensionCapError("dense materialization limited to dim <= 4096");
    Matrix h = Matrix::Zero(dim_, dim_);
    for (const auto& t : terms_) add_dense_term(t, h);
    return h;
  }

  // Dense matrix of a single named term embedded in the full space.
  Matrix dense_term(const std::string& name) const {
    Matrix h = Matrix::Zero(dim_, dim_);
    for (const auto& t : terms_)
      if (t.name == name) add_dense_term(t, h);
    return h;
  }

  void scale_all(double factor) {
    if (factor <= 0.0) throw ParameterError("scale factor must be positive");
    for (auto& t : terms_) t.norm_scale *= factor;
  }

  double norm_upper_bound() const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.norm_scale * t.op.operatorNorm();
    return s;
  }

 private:
  // Enumerate basis indices of the complement of the support and act with
  // t.op on the strided fibers.
  void apply_term(const LocalTerm& t, const Vector& x, Vector& y, Vector& sub,
                  Vector& mapped) const {
    const std::int64_t sdim = t.op.rows();
    std::vector<std::int64_t> offsets = support_offsets(t.support);
    std::vector<int> rest = complement(t.support);
    sub.resize(sdim);
    std::vector<int> digits(rest.size(), 0);
    const std::int64_t rest_count = dim_ / sdim;
    for (std::int64_t r = 0; r < rest_count; ++r) {
      std::int64_t base = 0;
      for (std::size_t k = 0; k < rest.size(); ++k)
        base += std::int64_t(digits[k]) * strides_[rest[k]];
      for (std::int64_t s = 0; s < sdim; ++s) sub(s) = x(base + offsets[s]);
      mapped.noalias() = (t.norm_scale * t.op) * sub;
      for (std::int64_t s = 0; s < sdim; ++s) y(base + offsets[s]) += mapped(s);
      for (int k = int(rest.size()) - 1; k >= 0; --k) {
        if (++digits[k] < regs_[rest[k]].dim) break;
        digits[k] = 0;
      }
    }
  }

  void add_dense_term(const LocalTerm& t, Matrix& h) const {
    const std::int64_t sdim = t.op.rows();
    std::vector<std::int64_t> offsets = support_offsets(t.support);
    std::vector<int> rest = complement(t.support);
    std::vector<int> digits(rest.size(), 0);
    const std::int64_t rest_count = dim_ / sdim;
    for (std::int64_t r = 0; r < rest_count; ++r) {
      std::int64_t base = 0;
      for (std::size_t k = 0; k < rest.size(); ++k)
        base += std::int64_t(digits[k]) * strides_[rest[k]];
      for (std::int64_t a = 0; a < sdim; ++a)
        for (std::int64_t b = 0; b < sdim; ++b)
          h(base + offsets[a], base + offsets[b]) += t.norm_scale * t.op(a, b);
      for (int k = int(rest.size()) - 1; k >= 0; --k) {
        if (++digits[k] < regs_[rest[k]].dim) break;
        digits[k] = 0;
      }
    }
  }

  // Full-space offset of each support multi-index (support order = term
  // row ordering, first support factor most significant).
  std::vector<std::int64_t> support_offsets(
      const std::vector<int>& support) const {
    std::int64_t sdim = 1;
    for (int s : support) sdim *= regs_[s].dim;
    std::vector<std::int64_t> offsets(sdim, 0);
    std::vector<int> digits(support.size(), 0);
    for (std::int64_t i = 0; i < sdim; ++i) {
      std::int64_t off = 0;
      for (std::size_t k = 0; k < support.size(); ++k)
        off += std::int64_t(digits[k]) * strides_[support[k]];
      offsets[i] = off;
      for (int k = int(support.size()) - 1; k >= 0; --k) {
        if (++digits[k] < regs_[support[k]].dim) break;
        digits[k] = 0;
      }
    }
    return offsets;
  }

  std::vector<int> complement(const std::vector<int>& support) const {
    std::vector<int> rest;
    for (int i = 0; i < int(regs_.size()); ++i)
      if (std::find(support.begin(), support.end(), i) == support.end())
        rest.push_back(i);
    return rest;
  }

  std::vector<Register> regs_;
  std::vector<LocalTerm> terms_;
  std::vector<std::int64_t> strides_;
  std::int64_t dim_ = 1;
};

}  // namespace qx
