#include <doctest.h>

#include <cmath>
#include <random>

#include "ptspectra/eigensolver.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/operators.hpp"
#include "support.hpp"

using namespace ptspectra;

namespace {

BasisSpec unit_basis(std::vector<std::size_t> dims) {
  return BasisSpec::make(dims, std::vector<double>(dims.size(), 1.0));
}

}  // namespace

TEST_CASE("ladder matrix elements") {
  const auto l2 = build_ladder(2);
  CHECK(l2.lowering(0, 1) == Complex(1.0));
  CHECK(l2.lowering(0, 0) == Complex(0.0));
  CHECK(l2.lowering(1, 0) == Complex(0.0));
  CHECK(l2.lowering(1, 1) == Complex(0.0));

  const auto l3 = build_ladder(3);
  CHECK(std::abs(l3.lowering(1, 2) - std::sqrt(2.0)) < 1e-15);

  CHECK_THROWS_AS(build_ladder(1), Error);
  for (std::size_t d : {2u, 5u, 9u}) {
    const auto l = build_ladder(d);
    CHECK(l.raising.matrix() == l.lowering.matrix().adjoint());
    const auto n = (l.raising * l.lowering).matrix();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        CHECK(std::abs(n(i, j) - (i == j ? double(i) : 0.0)) < 1e-14);
  }
}

TEST_CASE("position and momentum on one mode") {
  const auto b = unit_basis({2});
  const auto x = build_position(0, b);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(x(0, 1) - h) < 1e-15);
  CHECK(std::abs(x(1, 0) - h) < 1e-15);
  CHECK(x(0, 0) == Complex(0.0));

  const auto p = build_momentum(0, b);
  CHECK(std::abs(p(0, 1) - Complex(0, -h)) < 1e-15);
  CHECK(std::abs(p(1, 0) - Complex(0, h)) < 1e-15);

  const auto b4 = BasisSpec::make({2}, {4.0});
  CHECK(std::abs(build_position(0, b4)(0, 1) - std::sqrt(1.0 / 8.0)) < 1e-15);

  const auto b8 = unit_basis({8});
  const auto p8 = build_momentum(0, b8);
  CHECK(std::abs((p8 * p8)(0, 0) - 0.5) < 1e-15);
}

TEST_CASE("canonical commutator and its truncation corner") {
  for (double hbar : {1.0, 0.5}) {
    const std::size_t d = 8;
    const auto b = BasisSpec::make({d}, {1.7}, 1.3, hbar);
    const auto c = commutator(build_position(0, b).matrix(), build_momentum(0, b).matrix());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        Complex want = i == j ? Complex(0, hbar) : Complex(0.0);
        if (i == d - 1 && j == d - 1) want = Complex(0, -hbar * double(d - 1));
        CHECK(std::abs(c(i, j) - want) < 1e-13);
      }
  }
}

TEST_CASE("operators on different modes commute exactly") {
  const auto b = BasisSpec::make({4, 5}, {1.0, 2.0});
  const auto c = commutator(build_position(0, b).matrix(), build_momentum(1, b).matrix());
  CHECK(c.max_abs() == 0.0);
}

TEST_CASE("tensor placement of the second mode") {
  const auto b = unit_basis({2, 2});
  const auto y = build_position(1, b);
  CHECK(std::abs(y(b.flat_index({0, 0}), b.flat_index({0, 1})) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(y(b.flat_index({0, 0}), b.flat_index({1, 0})) == Complex(0.0));
}

TEST_CASE("Lz properties") {
  const auto b2 = unit_basis({2, 2});
  CHECK(std::abs(build_lz(b2).matrix().trace()) < 1e-15);

  const auto b = unit_basis({20, 20});
  const auto lz = build_lz(b);
  const auto x = build_position(0, b).matrix(), y = build_position(1, b).matrix();
  const auto r2 = x * x + y * y;
  // Truncation spoils the identity only near the top of each mode.
  const auto c = commutator(lz.matrix(), r2);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.total_dim(); ++i) {
    const auto qi = b.quanta(i);
    if (qi[0] + qi[1] > 14) continue;
    for (std::size_t j = 0; j < b.total_dim(); ++j) {
      const auto qj = b.quanta(j);
      if (qj[0] + qj[1] > 14) continue;
      worst = std::max(worst, std::abs(c(i, j)));
    }
  }
  CHECK(worst < 1e-10);

  // Lz conserves n_x + n_y, so the shell n_x + n_y = 4 is an exact invariant
  // subspace even in the truncated basis.
  std::vector<std::size_t> shell;
  for (std::size_t i = 0; i < b.total_dim(); ++i) {
    const auto q = b.quanta(i);
    if (q[0] + q[1] == 4) shell.push_back(i);
  }
  ComplexMatrix block(shell.size(), shell.size());
  for (std::size_t i = 0; i < shell.size(); ++i)
    for (std::size_t j = 0; j < shell.size(); ++j) block(i, j) = lz(shell[i], shell[j]);
  const auto ev = eigenvalues(block);
  for (const auto& v : ev.values) {
    CHECK(std::abs(v.imag()) < 1e-10);
    CHECK(std::abs(v.real() - std::round(v.real())) < 1e-10);
    CHECK(std::abs(std::round(v.real())) <= 4.0);
  }
}

TEST_CASE("tensor products") {
  const auto i2 = OperatorMatrix(ComplexMatrix::identity(2), unit_basis({2}));
  const auto i4 = tensor_product(i2, i2);
  CHECK(i4.matrix() == ComplexMatrix::identity(4));
  CHECK(i4.basis().dims == std::vector<std::size_t>{2, 2});

  const auto a3 = OperatorMatrix(ComplexMatrix::identity(3), unit_basis({3}));
  const auto b4 = OperatorMatrix(ComplexMatrix::identity(4), unit_basis({4}));
  CHECK(tensor_product(a3, b4).dim() == 12);

  std::mt19937_64 rng(7);
  const auto a = OperatorMatrix(testing::random_matrix(2, rng), unit_basis({2}));
  const auto b = OperatorMatrix(testing::random_matrix(2, rng), unit_basis({2}));
  const auto c = OperatorMatrix(testing::random_matrix(3, rng), unit_basis({3}));
  const auto lhs = tensor_product(a, i2) * tensor_product(i2, b);
  CHECK(max_abs_diff(lhs.matrix(), tensor_product(a, b).matrix()) < 1e-15);
  // Entries are triple products; only the rounding of the grouping differs.
  CHECK(max_abs_diff(tensor_product(tensor_product(a, b), c).matrix(),
                     tensor_product(a, tensor_product(b, c)).matrix()) < 1e-15);

  const auto other_mass = OperatorMatrix(ComplexMatrix::identity(2), BasisSpec::make({2}, {1.0}, 2.0));
  CHECK_THROWS_AS(tensor_product(i2, other_mass), Error);
}

TEST_CASE("TensorOperator densifies to the product-space operator") {
  const auto b = BasisSpec::make({4, 3}, {1.0, 2.0});
  const auto x = TensorOperator::position(b, 0), py = TensorOperator::momentum(b, 1);
  const auto op = Complex(0, 2.0) * (x * py) + x * x;
  const auto dense = build_position(0, b) * build_momentum(1, b);
  const auto want = Complex(0, 2.0) * dense + build_position(0, b) * build_position(0, b);
  CHECK(max_abs_diff(op.dense().matrix(), want.matrix()) < 1e-14);

  const auto lz = TensorOperator::lz(b);
  CHECK(max_abs_diff(lz.dense().matrix(), build_lz(b).matrix()) < 1e-14);

  const auto sum = TensorOperator::position(b, 0) * TensorOperator::position(b, 0) +
                   TensorOperator::momentum(b, 1) * TensorOperator::momentum(b, 1);
  CHECK(sum.is_kronecker_sum());
  CHECK_FALSE(op.is_kronecker_sum());
}

TEST_CASE("basis validation") {
  CHECK_THROWS_AS(BasisSpec::make({0}, {1.0}), Error);
  CHECK_THROWS_AS(BasisSpec::make({2, 2}, {1.0}), Error);
  CHECK_THROWS_AS(BasisSpec::make({2}, {-1.0}), Error);
  CHECK_THROWS_AS(BasisSpec::make({2}, {1.0}, 1.0, 1.0, {1.0}), Error);
  const auto b = BasisSpec::make({3, 4, 5}, {1.0, 1.0, 1.0});
  CHECK(b.total_dim() == 60);
  for (std::size_t i = 0; i < 60; ++i) CHECK(b.flat_index(b.quanta(i)) == i);
  CHECK_THROWS_AS(build_position(3, b), Error);
}

TEST_CASE("rotated basis scales position and momentum by conjugate phases") {
  const double th = 0.3;
  const auto plain = BasisSpec::make({5}, {1.0});
  const auto rot = BasisSpec::make({5}, {1.0}, 1.0, 1.0, {th});
  const auto x0 = build_position(0, plain).matrix(), x1 = build_position(0, rot).matrix();
  const auto p0 = build_momentum(0, plain).matrix(), p1 = build_momentum(0, rot).matrix();
  CHECK(max_abs_diff(x1, std::polar(1.0, th) * x0) < 1e-15);
  CHECK(max_abs_diff(p1, std::polar(1.0, -th) * p0) < 1e-15);
}
