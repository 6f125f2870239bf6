#include <doctest.h>

#include <cmath>
#include <random>

#include "ptspectra/eigensolver.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/families.hpp"
#include "ptspectra/models.hpp"
#include "ptspectra/phase.hpp"

using namespace ptspectra;

namespace {

ModelOneAt lambda_at() {
  return [](double l) { return ModelOneParams{.lambda = l}; };
}

ModelTwoAt field_at() {
  return [](double b) { return ModelTwoParams{.B = b}; };
}

// A two-level indicator family with a known threshold; no matrices.
HamiltonianFamily step_family(double threshold) {
  return [threshold](double v) {
    FamilyPoint p;
    // A jump rather than a slope, so the classifier's Critical band plays no part.
    p.levels = v > threshold ? ComplexVector{Complex(1, 0.5), Complex(1, -0.5)}
                             : ComplexVector{1.0, 2.0};
    p.scale = 2.0;
    return p;
  };
}

}  // namespace

TEST_CASE("parity matrices are involutions") {
  const auto b2 = BasisSpec::make({4, 4}, {1.0, 2.0});
  const auto b3 = BasisSpec::make({3, 3, 2}, {1.0, 1.0, 1.0});
  const auto sq = BasisSpec::make({4, 4}, {1.0, 1.0});
  for (auto [v, b] : {std::pair{ParityVariant::P1, b2}, std::pair{ParityVariant::P2, b2},
                      std::pair{ParityVariant::P3, sq}, std::pair{ParityVariant::SpaceInversion3D, b3}}) {
    const auto p = parity_matrix(v, b).matrix();
    CHECK(p * p == ComplexMatrix::identity(b.total_dim()));
  }
  CHECK_THROWS_AS(parity_matrix(ParityVariant::SpaceInversion3D, b2), Error);
  CHECK_THROWS_AS(parity_matrix(ParityVariant::P3, b2), Error);  // unequal scales
  CHECK_THROWS_AS(parity_matrix(ParityVariant::P2, BasisSpec::make({4}, {1.0})), Error);
}

TEST_CASE("PT invariance of model-1 and the P3 exception") {
  for (double l : {0.0, 0.7, 3.0}) {
    const ModelOneParams p{.lambda = l};
    const auto basis = model1_basis(p, 8, 8);
    const auto h = hamiltonian_model1(p, basis).matrix();
    const auto p1 = parity_matrix(ParityVariant::P1, basis).matrix();
    CHECK(p1 * h.conj() * p1 == h);
  }
  // P3 swaps x and y, so it needs a common scale; use one for both modes.
  const ModelOneParams p{};
  const auto basis = BasisSpec::make({8, 8}, {1.5, 1.5});
  const auto h0 = hamiltonian_model1(p, basis).matrix();
  const auto p3 = parity_matrix(ParityVariant::P3, basis).matrix();
  CHECK(max_abs_diff(p3 * h0 * p3, h0) > 0.1);
  const ModelOneParams iso{.omega_x = 1.0, .omega_y = 1.0};
  const auto hi = hamiltonian_model1(iso, basis).matrix();
  CHECK(max_abs_diff(p3 * hi * p3, hi) < 1e-14);
}

TEST_CASE("parse_parity") {
  CHECK(parse_parity("P1") == ParityVariant::P1);
  CHECK(parse_parity("p2") == ParityVariant::P2);
  CHECK(parse_parity("SI3D") == ParityVariant::SpaceInversion3D);
  CHECK(parse_parity("spaceinversion3d") == ParityVariant::SpaceInversion3D);
  CHECK_FALSE(parse_parity("P4"));
}

TEST_CASE("classify") {
  const ComplexVector real{1.5, 2.5};
  const auto u = classify(real, spectral_scale(real));
  CHECK(u.kind == PhaseKind::Unbroken);
  CHECK(u.max_abs_im == 0.0);

  const ComplexVector broken{Complex(1, 0.5), Complex(1, -0.5)};
  CHECK(classify(broken, 1.0).kind == PhaseKind::Broken);
  // Between 1x and 10x the threshold: the hysteresis band.
  const ComplexVector band{Complex(1, 5e-8), Complex(1, -5e-8)};
  CHECK(classify(band, 1.0).kind == PhaseKind::Critical);
  CHECK(spectral_scale(ComplexVector{0.0, 0.0}) == 1.0);

  const ModelOneParams p12{.lambda = 1.2};
  auto lv = lowest_levels(eigenvalues(hamiltonian_model1(p12, model1_basis(p12, 40, 40))).values, 10);
  CHECK(classify(lv, spectral_scale(lv)).kind == PhaseKind::Unbroken);
  const ModelOneParams p3{.lambda = 3.0};
  lv = lowest_levels(eigenvalues(hamiltonian_model1(p3, model1_basis(p3, 30, 30))).values, 10);
  CHECK(classify(lv, spectral_scale(lv)).kind == PhaseKind::Broken);
}

TEST_CASE("lowest_levels never splits a pair") {
  const ComplexVector s{1.0, Complex(2, -1), Complex(2, 1), 3.0};
  CHECK(lowest_levels(s, 2).size() == 3);
  CHECK(lowest_levels(s, 3).size() == 3);
  CHECK(lowest_levels(s, 10).size() == 4);
}

TEST_CASE("pair_conjugates") {
  const ComplexVector s{Complex(0.5, 1.118034), Complex(0.5, -1.118034), 1.5};
  const auto p = pair_conjugates(s, 1e-9);
  REQUIRE(p.pairs.size() == 1);
  CHECK(p.reals == std::vector<std::size_t>{2});
  CHECK(p.unpaired.empty());
  CHECK(s[p.pairs[0].first].imag() > 0);

  const ComplexVector r{1.0, 2.0, 3.0};
  const auto pr = pair_conjugates(r, 1e-9);
  CHECK(pr.pairs.empty());
  CHECK(pr.reals.size() == 3);

  // Model 1 at lambda = 3: labels (n1,n2) <-> (n2,n1) give the pair structure.
  const ModelOneParams p3{.lambda = 3.0};
  auto all = eigenvalues(hamiltonian_model1(p3, model1_basis(p3, 40, 40))).values;
  const ComplexVector low(all.begin(), all.begin() + 12);
  const auto pm = pair_conjugates(low, 1e-7);
  std::size_t used = 2 * pm.pairs.size() + pm.reals.size() + pm.unpaired.size();
  CHECK(used == 12);
  CHECK(pm.unpaired.empty());
  // Oracle: analytic pairs and diagonal reals among the same 12 levels.
  std::size_t pairs = 0, reals = 0;
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a; b < 6; ++b) {
      const Complex e = spectrum_model1(p3, a, b);
      double d = 1e9;
      for (const auto& v : low) d = std::min(d, std::abs(v - e));
      if (d < 1e-7) (a == b ? reals : pairs)++;
    }
  CHECK(pm.pairs.size() == pairs);
  CHECK(pm.reals.size() == reals);
  // Idempotent: pairing the same list again gives the same partition.
  const auto again = pair_conjugates(low, 1e-7);
  CHECK(again.pairs == pm.pairs);
  CHECK(again.reals == pm.reals);
}

TEST_CASE("pt_residual") {
  const auto b = BasisSpec::make({4}, {1.0});
  const auto par = parity_matrix(ParityVariant::P1, b);
  CHECK(pt_residual(ComplexVector{1.0, 0.0, 0.0, 0.0}, par) == doctest::Approx(0.0));

  const ModelOneParams p12{.lambda = 1.2};
  const auto basis = model1_basis(p12, 30, 30);
  const auto h = hamiltonian_model1(p12, basis);
  const auto p1 = parity_matrix(ParityVariant::P1, basis);
  const auto dec = eigen_decompose_lowest(h.matrix(), 1);
  const auto& v = dec.vectors->front();
  CHECK(pt_residual(v, p1) < 1e-7);
  ComplexVector rotated = v;
  for (auto& z : rotated) z *= std::polar(1.0, 0.77);
  CHECK(std::abs(pt_residual(rotated, p1) - pt_residual(v, p1)) < 1e-14);

  const ModelOneParams p3{.lambda = 3.0};
  const auto b3 = model1_basis(p3, 30, 30);
  const auto h3 = hamiltonian_model1(p3, b3);
  const auto d3 = eigen_decompose_lowest(h3.matrix(), 3);
  REQUIRE(std::abs(d3.values[1].imag()) > 0.5);
  CHECK(pt_residual((*d3.vectors)[1], parity_matrix(ParityVariant::P1, b3)) > 0.1);
}

TEST_CASE("find_critical on the analytic model-1 family") {
  const auto fam = model1_analytic_family(lambda_at(), 10);
  const auto r = find_critical(fam, 0.0, 3.0, 1e-10);
  CHECK(std::abs(r.estimate - 1.5) <= 1e-10);
  CHECK(r.lo <= 1.5);
  CHECK(r.hi >= 1.5);
  const auto r2 = find_critical(fam, 0.4, 2.2, 1e-10);
  CHECK(std::abs(r2.estimate - r.estimate) <= 2e-10);
  CHECK_THROWS_AS(find_critical(fam, 2.0, 3.0, 1e-6), Error);
  CHECK_THROWS_AS(find_critical(fam, 0.0, 1.0, 1e-6), Error);
}

TEST_CASE("find_critical on a synthetic family and on model-1 matrices") {
  const auto r = find_critical(step_family(0.3), 0.0, 1.0, 1e-9);
  CHECK(std::abs(r.estimate - 0.3) < 1e-8);

  const auto fam = model1_family(lambda_at(), 24, 24, 10);
  const auto a = find_critical(fam, 0.0, 3.0, 1e-4);
  const auto b = find_critical(fam, 1.0, 2.0, 1e-4);
  CHECK(std::abs(a.estimate - 1.5) < 2e-4);
  CHECK(std::abs(a.estimate - b.estimate) < 2e-4);
}

TEST_CASE("phase flips once across the model-1 lambda grid") {
  const auto fam = model1_family(lambda_at(), 30, 30, 10);
  int flips = 0;
  PhaseKind prev = PhaseKind::Unbroken;
  for (int k = 0; k < 10; ++k) {
    const double l = 0.3 * k;
    const auto kind = classify_point(fam(l)).kind;
    if (l < 1.5) CHECK(kind == PhaseKind::Unbroken);
    if (l > 1.5) CHECK(kind == PhaseKind::Broken);
    if (kind != prev) ++flips;
    prev = kind;
  }
  CHECK(flips == 1);
}

TEST_CASE("model-2 family") {
  const auto fam = model2_family(field_at(), {24, 24, 12}, 10);
  CHECK(classify_point(fam(1.0)).kind == PhaseKind::Unbroken);
  CHECK(classify_point(fam(2.0)).kind == PhaseKind::Critical);
  CHECK(classify_point(fam(3.0)).kind == PhaseKind::Broken);
  const auto r = find_critical(fam, 0.0, 4.0, 1e-7);
  CHECK(std::abs(r.estimate - 2.0) < 1e-6);

  const auto lv = model2_converged_levels(ModelTwoParams{.B = 3.0}, {24, 24, 12});
  CHECK(lv.converged_per_mode[2] > 0);
  CHECK_THROWS_AS(model2_converged_levels(ModelTwoParams{}, {4, 24, 12}), Error);
}

TEST_CASE("convergence_study") {
  const auto at = [](double l) {
    return [l](std::size_t d) {
      const ModelOneParams p{.lambda = l};
      return eigenvalues(hamiltonian_model1(p, model1_basis(p, d, d))).values;
    };
  };
  // The top state of each truncated mode is off the ladder, so the smallest
  // dim keeps it above the lowest ten levels.
  const std::vector<std::size_t> d0{20, 30, 40};
  const auto t0 = convergence_study(at(0.0), d0, 10);
  REQUIRE(t0.rows.size() == 3);
  for (const auto& row : t0.rows) {
    const auto exact = analytic_levels_model1({}, 11);
    for (std::size_t i = 0; i < row.levels.size(); ++i) CHECK(std::abs(row.levels[i] - exact[i]) < 1e-12);
  }
  CHECK(t0.all_converged());
  CHECK(std::isnan(t0.rows[0].drift[0]));

  const std::vector<std::size_t> d1{20, 30, 40};
  CHECK(convergence_study(at(1.2), d1, 10).all_converged());
  // On small bases the slow decay near the exceptional point shows up.
  const std::vector<std::size_t> d2{12, 16, 20};
  const auto near = convergence_study(at(1.499), d2, 10);
  CHECK_FALSE(near.all_converged());
  double drift_far = 0, drift_near = 0;
  const auto far = convergence_study(at(1.2), d2, 10);
  CHECK(far.all_converged());
  for (double d : far.rows.back().drift) drift_far = std::max(drift_far, d);
  for (double d : near.rows.back().drift) drift_near = std::max(drift_near, d);
  CHECK(drift_near > drift_far);

  const std::vector<std::size_t> bad{20, 10};
  CHECK_THROWS_AS(convergence_study(at(0.0), bad, 4), Error);
}

TEST_CASE("match_distance") {
  const ComplexVector a{1.0, 2.0}, b{2.0 + 1e-3, 1.0, 7.0};
  CHECK(match_distance(a, b) == doctest::Approx(1e-3));
  CHECK_THROWS_AS(match_distance(b, a), Error);
}
