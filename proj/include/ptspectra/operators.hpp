#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ptspectra/basis.hpp"
#include "ptspectra/matrix.hpp"

namespace ptspectra {

// Dense operator on a truncated product basis. Immutable once built.
class OperatorMatrix {
 public:
  OperatorMatrix(ComplexMatrix entries, BasisSpec basis);

  std::size_t dim() const noexcept { return entries_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return entries_; }
  const BasisSpec& basis() const noexcept { return *basis_; }
  Complex operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

 private:
  ComplexMatrix entries_;
  std::shared_ptr<const BasisSpec> basis_;
};

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex s, const OperatorMatrix& a);

struct LadderPair {
  OperatorMatrix lowering;
  OperatorMatrix raising;
};

// a and a-dagger on a single mode of size dim (unit scale, m = hbar = 1).
LadderPair build_ladder(std::size_t dim);
OperatorMatrix build_position(std::size_t mode, const BasisSpec& basis);
OperatorMatrix build_momentum(std::size_t mode, const BasisSpec& basis);
// L_z = x p_y - y p_x on modes 0 and 1.
OperatorMatrix build_lz(const BasisSpec& basis);
// Kronecker product; the result lives on the concatenated basis.
OperatorMatrix tensor_product(const OperatorMatrix& a, const OperatorMatrix& b);

// Single-mode matrices (dim x dim) used to assemble product-space operators.
ComplexMatrix position_factor(const BasisSpec& basis, std::size_t mode);
ComplexMatrix momentum_factor(const BasisSpec& basis, std::size_t mode);

// Sum of Kronecker-product terms on a product basis:
//   sum_t coeff_t * F_{t,0} (x) F_{t,1} (x) ... ,
// with absent factors meaning identity. Products of operators on distinct
// modes stay factorized, so Hamiltonians on large product bases are
// assembled from small per-mode matrices and densified once.
class TensorOperator {
 public:
  struct Term {
    Complex coeff = 1.0;
    std::vector<std::optional<ComplexMatrix>> factors;
  };

  explicit TensorOperator(BasisSpec basis);

  static TensorOperator identity(const BasisSpec& basis);
  static TensorOperator local(const BasisSpec& basis, std::size_t mode, ComplexMatrix factor);
  static TensorOperator position(const BasisSpec& basis, std::size_t mode);
  static TensorOperator momentum(const BasisSpec& basis, std::size_t mode);
  static TensorOperator lz(const BasisSpec& basis);

  const BasisSpec& basis() const noexcept { return basis_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  TensorOperator& operator+=(const TensorOperator& rhs);
  TensorOperator& operator-=(const TensorOperator& rhs);
  TensorOperator& operator*=(Complex s);

  friend TensorOperator operator+(TensorOperator a, const TensorOperator& b) { return a += b; }
  friend TensorOperator operator-(TensorOperator a, const TensorOperator& b) { return a -= b; }
  friend TensorOperator operator*(Complex s, TensorOperator a) { return a *= s; }
  friend TensorOperator operator*(const TensorOperator& a, const TensorOperator& b);

  // True when every term acts on at most one mode (H = sum_i h_i).
  bool is_kronecker_sum() const;
  // Per-mode parts h_i of a Kronecker sum; constants are folded into mode 0.
  std::vector<ComplexMatrix> kronecker_sum_parts() const;

  OperatorMatrix dense() const;

 private:
  void simplify();

  BasisSpec basis_;
  std::vector<Term> terms_;
};

}  // namespace ptspectra
