#include <doctest.h>

#include <cmath>

#include "ptspectra/eigensolver.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/models.hpp"
#include "ptspectra/phase.hpp"

using namespace ptspectra;

namespace {

// Normal-mode frequencies squared straight from the 2x2 potential matrix
// [[wx^2, i lambda/m], [i lambda/m, wy^2]], independent of the k parametrization.
std::pair<Complex, Complex> potential_eigs(const ModelOneParams& p) {
  const Complex a = p.omega_x * p.omega_x, d = p.omega_y * p.omega_y, b = Complex(0, p.lambda / p.m);
  const Complex disc = std::sqrt((a - d) * (a - d) + 4.0 * b * b);
  return {(a + d - disc) / 2.0, (a + d + disc) / 2.0};
}

bool near_set(Complex z, Complex u, Complex v, double tol) {
  return std::abs(z - u) < tol || std::abs(z - v) < tol;
}

}  // namespace

TEST_CASE("normal modes at lambda = 0 recover the bare frequencies") {
  const auto nm = normal_modes({});
  REQUIRE(nm.k);
  CHECK(std::abs(*nm.k - 1.0) < 1e-15);
  CHECK(std::abs(nm.C1 - 1.0) < 1e-15);
  CHECK(std::abs(nm.C2 - 2.0) < 1e-15);
  CHECK(nm.regime == ModeRegime::Real);
}

TEST_CASE("normal modes in the real regime at lambda = 1.2") {
  const ModelOneParams p{.lambda = 1.2};
  const auto nm = normal_modes(p);
  CHECK(std::abs(nm.k_inv - 0.6) < 1e-15);
  CHECK(std::abs(nm.C1_sq - 1.6) < 1e-14);
  CHECK(std::abs(nm.C2_sq - 3.4) < 1e-14);
  CHECK(std::abs(nm.C1 - std::sqrt(1.6)) < 1e-14);
  CHECK(std::abs(nm.C2 - std::sqrt(3.4)) < 1e-14);
  const auto [e1, e2] = potential_eigs(p);
  CHECK(std::abs(nm.C1_sq - e1) < 1e-13);
  CHECK(std::abs(nm.C2_sq - e2) < 1e-13);
  CHECK(std::abs(spectrum_model1(p, 0, 0) - 0.5 * (std::sqrt(1.6) + std::sqrt(3.4))) < 1e-14);
  CHECK(std::abs(spectrum_model1(p, 0, 0) - 1.554410) < 1e-6);
}

TEST_CASE("normal modes in the complex regime at lambda = 3") {
  const ModelOneParams p{.lambda = 3.0};
  const auto nm = normal_modes(p);
  CHECK(nm.regime == ModeRegime::Complex);
  const Complex c1sq(2.5, -1.5 * std::sqrt(3.0));
  CHECK(std::abs(nm.C1_sq - c1sq) < 1e-14);
  CHECK(std::abs(nm.C2_sq - std::conj(c1sq)) < 1e-14);
  // Independent principal root: |z|^(1/2) at half the argument.
  const Complex root = std::polar(std::sqrt(std::abs(std::conj(c1sq))), 0.5 * std::arg(std::conj(c1sq)));
  CHECK(std::abs(nm.C2 - root) < 1e-14);
  CHECK(nm.C2.real() > 0.0);

  // The matrix oracle decides the level values.
  const auto h = hamiltonian_model1(p, model1_basis(p, 40, 40));
  const auto ev = eigenvalues(h).values;
  const Complex e10 = spectrum_model1(p, 1, 0), e01 = spectrum_model1(p, 0, 1);
  CHECK(std::abs(e10 - std::conj(e01)) < 1e-14);
  double d10 = 1e9, d01 = 1e9;
  for (const auto& v : ev) {
    d10 = std::min(d10, std::abs(v - e10));
    d01 = std::min(d01, std::abs(v - e01));
  }
  CHECK(d10 < 1e-8);
  CHECK(d01 < 1e-8);
}

TEST_CASE("exceptional and singular regimes") {
  const ModelOneParams ep{.lambda = 1.5};
  const auto nm = normal_modes(ep);
  CHECK(nm.regime == ModeRegime::Exceptional);
  CHECK_FALSE(nm.k);
  CHECK(std::abs(nm.C1_sq - 2.5) < 1e-15);
  CHECK(std::abs(nm.C2_sq - 2.5) < 1e-15);

  const ModelOneParams iso{.omega_x = 1.0, .omega_y = 1.0, .lambda = 0.5};
  const auto ni = normal_modes(iso);
  CHECK(ni.regime == ModeRegime::Singular);
  CHECK(std::abs(ni.C1_sq.imag()) > 0.0);
  CHECK(std::abs(spectrum_model1(iso, 1, 0).imag()) > 0.0);
  const auto [e1, e2] = potential_eigs(iso);
  CHECK(near_set(ni.C1_sq, e1, e2, 1e-14));
  CHECK(near_set(ni.C2_sq, e1, e2, 1e-14));
}

TEST_CASE("model-1 invariant suite over a lambda grid") {
  for (double lambda : {0.0, 0.3, 0.9, 1.2, 1.49, 1.51, 2.0, 3.0, -2.5}) {
    const ModelOneParams p{.lambda = lambda};
    const auto nm = normal_modes(p);
    CAPTURE(lambda);
    CHECK(std::abs(nm.C1_sq + nm.C2_sq - nm.omega_plus_sq) < 1e-12 * nm.omega_plus_sq);
    const bool broken = std::abs(lambda) > critical_coupling(p);
    for (std::size_t a = 0; a < 20; ++a)
      for (std::size_t b = 0; b < 20; ++b) {
        const Complex e = spectrum_model1(p, a, b);
        if (broken) {
          CHECK(e == std::conj(spectrum_model1(p, b, a)));
          if (a == b) CHECK(e.imag() == 0.0);
        } else {
          CHECK(e.imag() == 0.0);
        }
      }
    if (nm.alpha && nm.beta) {
      CHECK(std::abs(*nm.alpha * *nm.alpha + *nm.beta * *nm.beta - 1.0) < 1e-14);
      CHECK(std::abs(*nm.alpha * *nm.alpha - *nm.beta * *nm.beta - *nm.k) < 1e-14);
    }
  }
}

TEST_CASE("critical coupling and field") {
  CHECK(critical_coupling({}) == 1.5);
  CHECK(critical_coupling({.omega_x = 1.0, .omega_y = 1.0}) == 0.0);
  CHECK(std::abs(critical_coupling({.m = 2.0, .omega_x = 1.0, .omega_y = std::sqrt(2.0)}) - 1.0) < 1e-15);
  CHECK(critical_coupling({.m = 2.0}) == 2.0 * critical_coupling({}));

  CHECK(critical_field({}) == 2.0);
  CHECK(critical_field({.m = 2.0, .omega = 3.0}) == 12.0);
  CHECK(critical_field({.omega = 0.0}) == 0.0);
  CHECK(critical_field({.omega = 2.0}) == 2.0 * critical_field({}));
}

TEST_CASE("model-1 Hamiltonian matrix") {
  const ModelOneParams p0{};
  const auto h0 = hamiltonian_model1(p0, model1_basis(p0, 30, 30));
  CHECK(std::abs(eigenvalues(h0).values.front() - 1.5) < 1e-10);

  const ModelOneParams p{.lambda = 1.2};
  const auto basis = model1_basis(p, 40, 40);
  const auto h = hamiltonian_model1(p, basis);
  CHECK(std::abs(eigenvalues(h).values.front() - spectrum_model1(p, 0, 0)) < 1e-8);

  const auto par = parity_matrix(ParityVariant::P1, basis).matrix();
  CHECK(par * h.matrix().conj() * par == h.matrix());

  CHECK_THROWS_AS(hamiltonian_model1(p, BasisSpec::make({4, 4, 4}, {1.0, 2.0, 1.0})), Error);
  CHECK_THROWS_AS(hamiltonian_model1(p, BasisSpec::make({4, 4}, {1.0, 2.0}, 2.0)), Error);
}

TEST_CASE("analytic model-1 levels") {
  const auto lv = analytic_levels_model1({}, 4);
  CHECK(lv.size() == 16);
  CHECK(lv[0] == Complex(1.5));
  CHECK(lv[1] == Complex(2.5));
  CHECK(lv[2] == Complex(3.5));
  CHECK(lv[3] == Complex(3.5));
}

TEST_CASE("model-2 analytic levels") {
  CHECK(std::abs(spectrum_model2({}, 0, 0, 0) - 1.5) < 1e-15);
  const ModelTwoParams b1{.B = 1.0};
  CHECK(std::abs(std::sqrt(b1.omega1_sq()) - std::sqrt(0.75)) < 1e-15);
  CHECK(std::abs(spectrum_model2(b1, 0, 0, 0) - (std::sqrt(0.75) + 0.5)) < 1e-15);
  CHECK(std::abs(spectrum_model2(b1, 0, 0, 0) - 1.366025) < 1e-6);
  const ModelTwoParams b3{.B = 3.0};
  const Complex up = spectrum_model2(b3, 0, 0, 0, +1), down = spectrum_model2(b3, 0, 0, 0, -1);
  CHECK(std::abs(up - Complex(0.5, std::sqrt(1.25))) < 1e-15);
  CHECK(down == std::conj(up));
}

TEST_CASE("model-2 full form at zero field is the isotropic oscillator") {
  const ModelTwoParams p{};
  const auto b = model2_basis(p, 5, 5, 4);
  const auto full = hamiltonian_model2_full(p, b).matrix();
  // Number-basis oracle: n + 1/2 per mode, except at the top state n = d - 1
  // where the truncated a a-dagger vanishes and the diagonal drops to n / 2.
  for (std::size_t i = 0; i < b.total_dim(); ++i) {
    const auto q = b.quanta(i);
    for (std::size_t j = 0; j < b.total_dim(); ++j) {
      if (i == j) {
        double want = 0.0;
        for (std::size_t k = 0; k < 3; ++k) want += q[k] + 1 == b.dims[k] ? 0.5 * q[k] : q[k] + 0.5;
        CHECK(std::abs(full(i, j) - want) < 1e-13);
      } else {
        CHECK(std::abs(full(i, j)) < 1e-13);
      }
    }
  }
  CHECK(max_abs_diff(full, hamiltonian_model2_reduced(p, b).matrix()) < 1e-14);
}

TEST_CASE("model-2 cross terms cancel exactly") {
  for (double B : {0.5, 1.0, 3.0}) {
    const ModelTwoParams p{.B = B};
    const auto b = model2_basis(p, 6, 6, 4);
    CHECK(max_abs_diff(hamiltonian_model2_full(p, b).matrix(), hamiltonian_model2_reduced(p, b).matrix()) < 1e-10);
  }
}

TEST_CASE("model-2 reduced spectra") {
  const ModelTwoParams b1{.B = 1.0};
  const auto osc = model2_reduced_eigenvalues(b1, model2_basis(b1, 24, 24, 12));
  CHECK(std::abs(osc.values.front() - spectrum_model2(b1, 0, 0, 0)) < 1e-7);
  const auto matched = model2_reduced_eigenvalues(b1, model2_rotated_basis(b1, 24, 24, 12, 0.0));
  CHECK(std::abs(matched.values.front() - spectrum_model2(b1, 0, 0, 0)) < 1e-13);
  // Kronecker path against one dense diagonalization.
  const auto small = model2_basis(b1, 6, 6, 5);
  const auto dense = eigenvalues(hamiltonian_model2_reduced(b1, small)).values;
  CHECK(match_distance(model2_reduced_eigenvalues(b1, small).values, dense) < 1e-12);

  const ModelTwoParams b3{.B = 3.0};
  const auto rot = model2_reduced_eigenvalues(b3, model2_rotated_basis(b3, 24, 24, 12));
  const auto all = pt_complete(rot.values, 1e-8 * spectral_scale(rot.values));
  const Complex want(0.5, std::sqrt(1.25));
  double du = 1e9, dd = 1e9;
  for (const auto& v : all) {
    du = std::min(du, std::abs(v - want));
    dd = std::min(dd, std::abs(v - std::conj(want)));
  }
  CHECK(du < 1e-6);
  CHECK(dd < 1e-6);
}

TEST_CASE("pt_complete") {
  const ComplexVector v{Complex(1, 2), 3.0, Complex(0.5, -1)};
  const auto c = pt_complete(v, 1e-12);
  CHECK(c.size() == 5);
  CHECK(std::is_sorted(c.begin(), c.end(), spectrum_less));
  const ComplexVector paired{Complex(1, 2), Complex(1, -2)};
  CHECK(pt_complete(paired, 1e-12).size() == 2);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(normal_modes({.m = 0.0}), Error);
  CHECK_THROWS_AS(normal_modes({.omega_x = -1.0}), Error);
  CHECK(critical_field({.c = 0.0}) == 0.0);  // a plain formula, no validation
  CHECK_THROWS_AS(model2_rotated_basis({}, 4, 4, 4, 1.0), Error);
}
