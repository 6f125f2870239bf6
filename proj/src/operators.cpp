#include "ptspectra/operators.hpp"

#include <cmath>
#include <string>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

ComplexMatrix lowering_matrix(std::size_t dim) {
  ComplexMatrix a(dim, dim);
  for (std::size_t n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

void require_mode(const BasisSpec& basis, std::size_t mode) {
  if (mode >= basis.modes())
    throw Error(ErrorKind::IndexOutOfRange,
                "mode " + std::to_string(mode) + " out of range for " +
                    std::to_string(basis.modes()) + "-mode basis");
}

BasisSpec single_mode_basis(std::size_t dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidBasis, "ladder operators need dim >= 2");
  return BasisSpec::make({dim}, {1.0});
}

void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!(a.basis() == b.basis()))
    throw Error(ErrorKind::InvalidBasis, "operators are built on different bases");
}

// out += coeff * (F_0 (x) F_1 (x) ...), identity where a factor is absent.
void accumulate_term(ComplexMatrix& out, const BasisSpec& basis, const TensorOperator::Term& t) {
  const std::size_t modes = basis.modes();
  ComplexMatrix tail = ComplexMatrix::identity(1);
  for (std::size_t m = modes; m-- > 1;) {
    const ComplexMatrix& f = t.factors[m] ? *t.factors[m] : ComplexMatrix::identity(basis.dims[m]);
    tail = kron(f, tail);
  }
  const std::size_t d0 = basis.dims[0];
  const std::size_t tn = tail.rows();
  const std::size_t n = out.rows();
  for (std::size_t i = 0; i < d0; ++i)
    for (std::size_t j = 0; j < d0; ++j) {
      Complex s = t.coeff;
      if (t.factors[0]) {
        s *= (*t.factors[0])(i, j);
      } else if (i != j) {
        continue;
      }
      if (s == Complex{}) continue;
      for (std::size_t k = 0; k < tn; ++k) {
        Complex* orow = out.data() + (i * tn + k) * n + j * tn;
        const Complex* trow = tail.data() + k * tn;
        for (std::size_t l = 0; l < tn; ++l) orow[l] += s * trow[l];
      }
    }
}

std::size_t support_size(const TensorOperator::Term& t) {
  std::size_t s = 0;
  for (const auto& f : t.factors) s += f.has_value();
  return s;
}

}  // namespace

OperatorMatrix::OperatorMatrix(ComplexMatrix entries, BasisSpec basis)
    : entries_(std::move(entries)), basis_(std::make_shared<const BasisSpec>(std::move(basis))) {
  if (!entries_.square()) throw Error(ErrorKind::InvalidInput, "operator matrix must be square");
  if (entries_.rows() != basis_->total_dim())
    throw Error(ErrorKind::InvalidBasis, "matrix dimension does not match basis");
  if (!entries_.all_finite()) throw Error(ErrorKind::InvalidInput, "operator matrix has non-finite entries");
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.matrix() + b.matrix(), a.basis()};
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.matrix() - b.matrix(), a.basis()};
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_basis(a, b);
  return {a.matrix() * b.matrix(), a.basis()};
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) { return {s * a.matrix(), a.basis()}; }

LadderPair build_ladder(std::size_t dim) {
  auto basis = single_mode_basis(dim);
  auto a = lowering_matrix(dim);
  auto ad = a.transpose();
  return {OperatorMatrix(std::move(a), basis), OperatorMatrix(std::move(ad), basis)};
}

ComplexMatrix position_factor(const BasisSpec& basis, std::size_t mode) {
  require_mode(basis, mode);
  const auto a = lowering_matrix(basis.dims[mode]);
  const double len = std::sqrt(basis.hbar / (2.0 * basis.mass * basis.scale_freqs[mode]));
  return (std::polar(len, basis.rotation(mode))) * (a + a.transpose());
}

ComplexMatrix momentum_factor(const BasisSpec& basis, std::size_t mode) {
  require_mode(basis, mode);
  const auto a = lowering_matrix(basis.dims[mode]);
  const double mom = std::sqrt(basis.mass * basis.hbar * basis.scale_freqs[mode] / 2.0);
  return (Complex(0.0, 1.0) * std::polar(mom, -basis.rotation(mode))) * (a.transpose() - a);
}

OperatorMatrix build_position(std::size_t mode, const BasisSpec& basis) {
  basis.validate();
  return TensorOperator::position(basis, mode).dense();
}

OperatorMatrix build_momentum(std::size_t mode, const BasisSpec& basis) {
  basis.validate();
  return TensorOperator::momentum(basis, mode).dense();
}

OperatorMatrix build_lz(const BasisSpec& basis) {
  basis.validate();
  return TensorOperator::lz(basis).dense();
}

OperatorMatrix tensor_product(const OperatorMatrix& a, const OperatorMatrix& b) {
  const auto& ba = a.basis();
  const auto& bb = b.basis();
  if (ba.mass != bb.mass || ba.hbar != bb.hbar)
    throw Error(ErrorKind::InvalidBasis, "tensor_product: incompatible bases");
  BasisSpec joined = ba;
  joined.dims.insert(joined.dims.end(), bb.dims.begin(), bb.dims.end());
  joined.scale_freqs.insert(joined.scale_freqs.end(), bb.scale_freqs.begin(), bb.scale_freqs.end());
  joined.rotations.clear();
  if (ba.rotated() || bb.rotated())
    for (std::size_t m = 0; m < joined.modes(); ++m)
      joined.rotations.push_back(m < ba.modes() ? ba.rotation(m) : bb.rotation(m - ba.modes()));
  joined.validate();
  return {kron(a.matrix(), b.matrix()), std::move(joined)};
}

TensorOperator::TensorOperator(BasisSpec basis) : basis_(std::move(basis)) { basis_.validate(); }

TensorOperator TensorOperator::identity(const BasisSpec& basis) {
  TensorOperator op(basis);
  op.terms_.push_back({1.0, std::vector<std::optional<ComplexMatrix>>(basis.modes())});
  return op;
}

TensorOperator TensorOperator::local(const BasisSpec& basis, std::size_t mode, ComplexMatrix factor) {
  require_mode(basis, mode);
  if (factor.rows() != basis.dims[mode] || !factor.square())
    throw Error(ErrorKind::InvalidBasis, "local factor does not match mode dimension");
  TensorOperator op(basis);
  Term t{1.0, std::vector<std::optional<ComplexMatrix>>(basis.modes())};
  t.factors[mode] = std::move(factor);
  op.terms_.push_back(std::move(t));
  return op;
}

TensorOperator TensorOperator::position(const BasisSpec& basis, std::size_t mode) {
  return local(basis, mode, position_factor(basis, mode));
}

TensorOperator TensorOperator::momentum(const BasisSpec& basis, std::size_t mode) {
  return local(basis, mode, momentum_factor(basis, mode));
}

TensorOperator TensorOperator::lz(const BasisSpec& basis) {
  if (basis.modes() < 2) throw Error(ErrorKind::InvalidBasis, "L_z needs at least two modes");
  return position(basis, 0) * momentum(basis, 1) - position(basis, 1) * momentum(basis, 0);
}

TensorOperator& TensorOperator::operator+=(const TensorOperator& rhs) {
  if (!(basis_ == rhs.basis_)) throw Error(ErrorKind::InvalidBasis, "operators on different bases");
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  simplify();
  return *this;
}

TensorOperator& TensorOperator::operator-=(const TensorOperator& rhs) {
  return *this += Complex(-1.0) * rhs;
}

TensorOperator& TensorOperator::operator*=(Complex s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

TensorOperator operator*(const TensorOperator& a, const TensorOperator& b) {
  if (!(a.basis_ == b.basis_)) throw Error(ErrorKind::InvalidBasis, "operators on different bases");
  TensorOperator out(a.basis_);
  for (const auto& ta : a.terms_)
    for (const auto& tb : b.terms_) {
      TensorOperator::Term t{ta.coeff * tb.coeff, ta.factors};
      for (std::size_t m = 0; m < t.factors.size(); ++m) {
        if (!tb.factors[m]) continue;
        t.factors[m] = t.factors[m] ? (*t.factors[m]) * (*tb.factors[m]) : *tb.factors[m];
      }
      out.terms_.push_back(std::move(t));
    }
  out.simplify();
  return out;
}

// Folds constants and same-mode local terms together; multi-mode terms are
// merged only when their factor lists are identical.
void TensorOperator::simplify() {
  std::vector<Term> merged;
  for (auto& t : terms_) {
    const auto s = support_size(t);
    bool absorbed = false;
    for (auto& m : merged) {
      if (support_size(m) != s) continue;
      bool same_support = true;
      for (std::size_t k = 0; k < t.factors.size(); ++k)
        same_support &= t.factors[k].has_value() == m.factors[k].has_value();
      if (!same_support) continue;
      if (s == 0) {
        m.coeff += t.coeff;
        absorbed = true;
      } else if (s == 1) {
        for (std::size_t k = 0; k < t.factors.size(); ++k) {
          if (!t.factors[k]) continue;
          ComplexMatrix f = m.coeff * (*m.factors[k]);
          f += t.coeff * (*t.factors[k]);
          m.factors[k] = std::move(f);
          m.coeff = 1.0;
        }
        absorbed = true;
      } else if (m.factors == t.factors) {
        m.coeff += t.coeff;
        absorbed = true;
      }
      if (absorbed) break;
    }
    if (!absorbed) merged.push_back(std::move(t));
  }
  terms_ = std::move(merged);
}

bool TensorOperator::is_kronecker_sum() const {
  for (const auto& t : terms_)
    if (support_size(t) > 1) return false;
  return true;
}

std::vector<ComplexMatrix> TensorOperator::kronecker_sum_parts() const {
  if (!is_kronecker_sum()) throw Error(ErrorKind::InvalidInput, "operator is not a Kronecker sum");
  std::vector<ComplexMatrix> parts;
  for (auto d : basis_.dims) parts.push_back(ComplexMatrix::zeros(d));
  for (const auto& t : terms_) {
    bool placed = false;
    for (std::size_t k = 0; k < t.factors.size(); ++k)
      if (t.factors[k]) {
        parts[k] += t.coeff * (*t.factors[k]);
        placed = true;
      }
    if (!placed) parts[0] += t.coeff * ComplexMatrix::identity(basis_.dims[0]);
  }
  return parts;
}

OperatorMatrix TensorOperator::dense() const {
  const std::size_t n = basis_.total_dim();
  ComplexMatrix out(n, n);
  for (const auto& t : terms_) accumulate_term(out, basis_, t);
  return {std::move(out), basis_};
}

}  // namespace ptspectra
