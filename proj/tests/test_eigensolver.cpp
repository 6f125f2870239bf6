#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ptspectra/eigensolver.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/models.hpp"
#include "ptspectra/phase.hpp"
#include "support.hpp"

using namespace ptspectra;

namespace {

ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  ComplexMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (const auto& v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Largest ratio between the off-diagonal row and column norms of any index.
double max_ratio(const ComplexMatrix& a) {
  double worst = 1.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double r = 0.0, c = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j == i) continue;
      r += std::abs(a(i, j));
      c += std::abs(a(j, i));
    }
    if (r > 0 && c > 0) worst = std::max(worst, std::max(r / c, c / r));
  }
  return worst;
}

// 1 when the vectors agree up to a phase.
double overlap(const ComplexVector& u, const ComplexVector& v) {
  return std::abs(dot(u, v)) / (norm2(u) * norm2(v));
}

}  // namespace

TEST_CASE("Pauli-x and the rotation generator") {
  const auto px = eigenvalues(from_rows({{0, 1}, {1, 0}}));
  REQUIRE(px.values.size() == 2);
  CHECK(std::abs(px.values[0] - Complex(-1)) < 1e-14);
  CHECK(std::abs(px.values[1] - Complex(1)) < 1e-14);
  CHECK(px.all_converged());

  const auto rg = eigenvalues(from_rows({{0, 1}, {-1, 0}}));
  CHECK(std::abs(rg.values[0] - Complex(0, -1)) < 1e-14);
  CHECK(std::abs(rg.values[1] - Complex(0, 1)) < 1e-14);
}

TEST_CASE("2x2 blocks against the quadratic formula") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = testing::random_matrix(2, rng);
    auto [l0, l1] = testing::eig2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
    ComplexVector want{l0, l1};
    sort_spectrum(want);
    const auto got = eigenvalues(a).values;
    CHECK(std::abs(got[0] - want[0]) < 1e-13);
    CHECK(std::abs(got[1] - want[1]) < 1e-13);
  }
}

TEST_CASE("random matrices: trace and determinant oracles") {
  std::mt19937_64 rng(12345);
  for (std::size_t n : {1u, 2u, 5u, 13u, 30u}) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto a = testing::random_matrix(n, rng);
      const auto res = eigenvalues(a);
      REQUIRE(res.values.size() == n);
      CHECK(res.all_converged());
      Complex sum = 0.0;
      for (const auto& v : res.values) sum += v;
      CHECK(std::abs(sum - a.trace()) < 1e-11 * a.frobenius_norm());
      const Complex det = testing::lu_determinant(a);
      Complex prod = 1.0;
      for (const auto& v : res.values) prod *= v;
      CHECK(std::abs(prod - det) < 1e-9 * std::abs(det));
      CHECK(std::is_sorted(res.values.begin(), res.values.end(), spectrum_less));
    }
  }
}

TEST_CASE("real matrices give conjugate-closed spectra") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  ComplexMatrix a(12, 12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) a(i, j) = u(rng);
  const auto res = eigenvalues(a);
  for (const auto& v : res.values) {
    double best = 1e9;
    for (const auto& w : res.values) best = std::min(best, std::abs(std::conj(v) - w));
    CHECK(best < 1e-10);
  }
}

TEST_CASE("solver paths agree: real gauge, complex QR, unsplit") {
  const ModelOneParams p{.lambda = 2.0};
  const auto h = hamiltonian_model1(p, model1_basis(p, 14, 14)).matrix();
  SolverConfig cplx;
  cplx.real_arithmetic = false;
  SolverConfig whole = cplx;
  whole.split_blocks = false;
  const auto a = eigenvalues(h).values;
  const auto b = eigenvalues(h, cplx).values;
  const auto c = eigenvalues(h, whole).values;
  REQUIRE(a.size() == b.size());
  const ComplexVector low(a.begin(), a.begin() + 20);
  CHECK(match_distance(low, b) < 1e-10);
  CHECK(match_distance(low, c) < 1e-10);
}

TEST_CASE("deterministic ordering") {
  std::mt19937_64 rng(5);
  const auto a = testing::random_matrix(17, rng);
  const auto r1 = eigenvalues(a).values, r2 = eigenvalues(a).values;
  CHECK(r1 == r2);
}

TEST_CASE("balance") {
  const ComplexVector d{1.0, 2.0, Complex(0, 3)};
  const auto diag = ComplexMatrix::diagonal(d);
  const auto bd = balance(diag);
  CHECK(bd.matrix == diag);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> expo(-6, 6);
  ComplexMatrix a(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) a(i, j) = Complex(std::pow(10.0, expo(rng)), std::pow(10.0, expo(rng)) * 0.1);
  const auto b = balance(a);
  CHECK(std::abs(b.matrix.trace() - a.trace()) <= 1e-12 * std::abs(a.trace()));
  CHECK(max_ratio(b.matrix) < 16.0);
  CHECK(max_ratio(a) > max_ratio(b.matrix));
  for (double s : b.scaling) CHECK(std::exp2(std::round(std::log2(s))) == s);
  // The determinant survives the similarity as well.
  const Complex da = testing::lu_determinant(a), db = testing::lu_determinant(b.matrix);
  CHECK(std::abs(da - db) <= 1e-12 * std::abs(da));
}

TEST_CASE("Hessenberg reduction") {
  const auto two = from_rows({{1, 2}, {3, 4}});
  const auto h2 = hessenberg(two);
  CHECK(h2.h == two);
  CHECK(h2.q == ComplexMatrix::identity(2));

  std::mt19937_64 rng(50);
  const auto a = testing::random_matrix(50, rng);
  const auto hr = hessenberg(a);
  for (std::size_t i = 2; i < 50; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) CHECK(hr.h(i, j) == Complex(0.0));
  const auto back = hr.q * hr.h * hr.q.adjoint();
  CHECK((back - a).frobenius_norm() / a.frobenius_norm() < 1e-13);
  CHECK((hr.q.adjoint() * hr.q - ComplexMatrix::identity(50)).frobenius_norm() < 1e-13);
  CHECK(std::abs(hr.h.trace() - a.trace()) < 1e-12 * a.frobenius_norm());
}

TEST_CASE("eigenvectors") {
  const auto d = ComplexMatrix::diagonal(ComplexVector{1.0, 2.0, 3.0});
  const auto e2 = eigenvector(d, 2.0);
  CHECK(e2.converged);
  CHECK(overlap(e2.vector, {0.0, 1.0, 0.0}) > 1 - 1e-12);

  const auto px = eigenvector(from_rows({{0, 1}, {1, 0}}), 1.0);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(overlap(px.vector, {h, h}) > 1 - 1e-12);
  CHECK(std::abs(norm2(px.vector) - 1.0) < 1e-14);

  const ModelOneParams p{.lambda = 1.2};
  const auto hm = hamiltonian_model1(p, model1_basis(p, 30, 30));
  const auto ground = eigenvalues(hm).values.front();
  const auto gv = eigenvector(hm, ground);
  CHECK(gv.converged);
  CHECK(gv.residual < 1e-9);
  CHECK(testing::residual(hm.matrix(), gv.vector, ground) < 1e-9 * hm.matrix().frobenius_norm());
}

TEST_CASE("eigen_decompose returns aligned residual-checked vectors") {
  std::mt19937_64 rng(8);
  const auto a = testing::random_matrix(25, rng);
  const auto res = eigen_decompose(a);
  REQUIRE(res.vectors);
  REQUIRE(res.vectors->size() == 25);
  for (std::size_t i = 0; i < 25; ++i)
    CHECK(testing::residual(a, (*res.vectors)[i], res.values[i]) <= 1e-9 * a.frobenius_norm());

  const auto lowest = eigen_decompose_lowest(a, 4);
  CHECK(lowest.values == res.values);
  REQUIRE(lowest.vectors->size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(testing::residual(a, (*lowest.vectors)[i], lowest.values[i]) <= 1e-9 * a.frobenius_norm());
}

TEST_CASE("decoupled blocks and Kronecker sums") {
  const auto a = from_rows({{1, 0, 2}, {0, 5, 0}, {3, 0, 4}});
  const auto blocks = decoupled_blocks(a);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0] == std::vector<std::size_t>{0, 2});
  CHECK(blocks[1] == std::vector<std::size_t>{1});

  std::mt19937_64 rng(11);
  const auto h0 = testing::random_matrix(3, rng), h1 = testing::random_matrix(4, rng);
  const auto i3 = ComplexMatrix::identity(3), i4 = ComplexMatrix::identity(4);
  const auto dense = kron(h0, i4) + kron(i3, h1);
  const std::vector<ComplexMatrix> parts{h0, h1};
  const auto ks = kronecker_sum_eigenvalues(parts);
  const auto direct = eigenvalues(dense);
  REQUIRE(ks.values.size() == 12);
  CHECK(match_distance(ks.values, direct.values) < 1e-12);
}

TEST_CASE("sweep budget exhaustion is reported, not hidden") {
  std::mt19937_64 rng(21);
  const auto a = testing::random_matrix(20, rng);
  SolverConfig cfg;
  cfg.max_sweeps = 20;
  cfg.real_arithmetic = false;
  const auto res = eigenvalues(a, cfg);
  CHECK_FALSE(res.all_converged());
  CHECK(res.values.size() == 20);

  SolverConfig bad;
  bad.deflation_eps = 2.0;
  CHECK_THROWS_AS(eigenvalues(a, bad), Error);
  bad = {};
  bad.max_sweeps = 3;
  CHECK_THROWS_AS(eigenvalues(a, bad), Error);
}

TEST_CASE("Rayleigh shift strategy also converges") {
  std::mt19937_64 rng(31);
  const auto a = testing::random_matrix(15, rng);
  SolverConfig cfg;
  cfg.shift_strategy = ShiftStrategy::Rayleigh;
  cfg.real_arithmetic = false;
  const auto res = eigenvalues(a, cfg);
  CHECK(res.all_converged());
  CHECK(match_distance(res.values, eigenvalues(a).values) < 1e-10);
}
