#include "ptspectra/models.hpp"

#include <algorithm>
#include <cmath>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void require_modes(const BasisSpec& basis, std::size_t modes, const char* what) {
  if (basis.modes() != modes)
    throw Error(ErrorKind::InvalidBasis, std::string(what) + " needs a " + std::to_string(modes) +
                                             "-mode basis, got " + std::to_string(basis.modes()));
}

void require_units(const BasisSpec& basis, double m, double hbar) {
  if (basis.mass != m || basis.hbar != hbar)
    throw Error(ErrorKind::InvalidBasis, "basis mass/hbar differ from the model parameters");
}

TensorOperator square(const TensorOperator& a) { return a * a; }

}  // namespace

void ModelOneParams::validate() const {
  if (!positive_finite(m) || !positive_finite(hbar) || !positive_finite(omega_x) ||
      !positive_finite(omega_y))
    throw Error(ErrorKind::InvalidInput, "model 1: m, hbar, omega_x, omega_y must be positive");
  if (!std::isfinite(lambda)) throw Error(ErrorKind::InvalidInput, "model 1: lambda must be finite");
}

const char* to_string(ModeRegime r) noexcept {
  switch (r) {
    case ModeRegime::Real: return "real";
    case ModeRegime::Complex: return "complex";
    case ModeRegime::Singular: return "singular";
    case ModeRegime::Exceptional: return "exceptional";
  }
  return "?";
}

NormalModeData normal_modes(const ModelOneParams& p) {
  p.validate();
  NormalModeData d;
  const double wx2 = p.omega_x * p.omega_x;
  const double wy2 = p.omega_y * p.omega_y;
  d.omega_plus_sq = wx2 + wy2;
  d.omega_minus_sq = wy2 - wx2;

  if (d.omega_minus_sq == 0.0) {
    // omega_-^2 / k -> 2 i lambda / m as the anisotropy vanishes.
    d.regime = ModeRegime::Singular;
    const Complex shift(0.0, 2.0 * p.lambda / p.m);
    d.C1_sq = 0.5 * (d.omega_plus_sq - shift);
    d.C2_sq = 0.5 * (d.omega_plus_sq + shift);
  } else {
    const double ratio = 2.0 * p.lambda / (p.m * d.omega_minus_sq);
    const double radicand = 1.0 - ratio * ratio;
    if (radicand > 0.0) {
      d.regime = ModeRegime::Real;
      d.k_inv = std::sqrt(radicand);
    } else if (radicand < 0.0) {
      d.regime = ModeRegime::Complex;
      d.k_inv = Complex(0.0, std::sqrt(-radicand));
    } else {
      d.regime = ModeRegime::Exceptional;
      d.k_inv = 0.0;
    }
    if (d.regime != ModeRegime::Exceptional) {
      const Complex k = 1.0 / d.k_inv;
      d.k = k;
      d.alpha = std::sqrt(0.5 * (1.0 + k));
      d.beta = std::sqrt(0.5 * (1.0 - k));
    }
    d.C1_sq = 0.5 * (d.omega_plus_sq - d.omega_minus_sq * d.k_inv);
    d.C2_sq = 0.5 * (d.omega_plus_sq + d.omega_minus_sq * d.k_inv);
  }
  if (d.regime == ModeRegime::Real) {
    // Keep the real regime free of signed-zero imaginary parts.
    d.C1_sq = d.C1_sq.real();
    d.C2_sq = d.C2_sq.real();
  }
  d.C1 = std::sqrt(d.C1_sq);
  d.C2 = std::sqrt(d.C2_sq);
  return d;
}

double critical_coupling(const ModelOneParams& p) {
  return p.m * std::abs(p.omega_y * p.omega_y - p.omega_x * p.omega_x) / 2.0;
}

Complex spectrum_model1(const ModelOneParams& p, std::size_t n1, std::size_t n2) {
  const auto d = normal_modes(p);
  return p.hbar * ((static_cast<double>(n1) + 0.5) * d.C1 + (static_cast<double>(n2) + 0.5) * d.C2);
}

ComplexVector analytic_levels_model1(const ModelOneParams& p, std::size_t nmax) {
  const auto d = normal_modes(p);
  ComplexVector out;
  out.reserve(nmax * nmax);
  for (std::size_t n1 = 0; n1 < nmax; ++n1)
    for (std::size_t n2 = 0; n2 < nmax; ++n2)
      out.push_back(p.hbar * ((n1 + 0.5) * d.C1 + (n2 + 0.5) * d.C2));
  sort_spectrum(out);
  return out;
}

BasisSpec model1_basis(const ModelOneParams& p, std::size_t dx, std::size_t dy) {
  p.validate();
  return BasisSpec::make({dx, dy}, {p.omega_x, p.omega_y}, p.m, p.hbar);
}

TensorOperator model1_operator(const ModelOneParams& p, const BasisSpec& basis) {
  p.validate();
  basis.validate();
  require_modes(basis, 2, "model 1");
  require_units(basis, p.m, p.hbar);
  const auto x = TensorOperator::position(basis, 0);
  const auto y = TensorOperator::position(basis, 1);
  const auto px = TensorOperator::momentum(basis, 0);
  const auto py = TensorOperator::momentum(basis, 1);
  const double inv2m = 1.0 / (2.0 * p.m);
  return Complex(inv2m) * square(px) + Complex(inv2m) * square(py) +
         Complex(0.5 * p.m * p.omega_x * p.omega_x) * square(x) +
         Complex(0.5 * p.m * p.omega_y * p.omega_y) * square(y) + Complex(0.0, p.lambda) * (x * y);
}

OperatorMatrix hamiltonian_model1(const ModelOneParams& p, const BasisSpec& basis) {
  return model1_operator(p, basis).dense();
}

void ModelTwoParams::validate() const {
  if (!positive_finite(m) || !positive_finite(hbar) || !positive_finite(q) || !positive_finite(c) ||
      !positive_finite(omega))
    throw Error(ErrorKind::InvalidInput, "model 2: m, hbar, q, c, omega must be positive");
  if (!(B >= 0.0) || !std::isfinite(B))
    throw Error(ErrorKind::InvalidInput, "model 2: B must be finite and non-negative");
}

double ModelTwoParams::omega1_sq() const {
  const double wc = cyclotron();
  return omega * omega - wc * wc / 4.0;
}

double critical_field(const ModelTwoParams& p) { return 2.0 * p.m * p.omega * p.c / p.q; }

Complex spectrum_model2(const ModelTwoParams& p, std::size_t nx, std::size_t ny, std::size_t nz,
                        int branch) {
  p.validate();
  const double w1sq = p.omega1_sq();
  const double transverse = static_cast<double>(nx + ny + 1) * p.hbar;
  const double longitudinal = (static_cast<double>(nz) + 0.5) * p.hbar * p.omega;
  if (w1sq >= 0.0) return transverse * std::sqrt(w1sq) + longitudinal;
  const double sign = branch < 0 ? -1.0 : 1.0;
  return Complex(longitudinal, sign * transverse * std::sqrt(-w1sq));
}

ComplexVector analytic_levels_model2(const ModelTwoParams& p, std::size_t nmax) {
  const bool complex_pairs = p.omega1_sq() < 0.0;
  ComplexVector out;
  for (std::size_t nx = 0; nx < nmax; ++nx)
    for (std::size_t ny = 0; ny < nmax; ++ny)
      for (std::size_t nz = 0; nz < nmax; ++nz) {
        out.push_back(spectrum_model2(p, nx, ny, nz, +1));
        if (complex_pairs) out.push_back(spectrum_model2(p, nx, ny, nz, -1));
      }
  sort_spectrum(out);
  return out;
}

BasisSpec model2_basis(const ModelTwoParams& p, std::size_t dx, std::size_t dy, std::size_t dz) {
  p.validate();
  return BasisSpec::make({dx, dy, dz}, {p.omega, p.omega, p.omega}, p.m, p.hbar);
}

BasisSpec model2_rotated_basis(const ModelTwoParams& p, std::size_t dx, std::size_t dy,
                               std::size_t dz, double rotation) {
  p.validate();
  double transverse = std::sqrt(std::abs(p.omega1_sq()));
  if (!(transverse > 0.0)) transverse = p.omega;
  std::vector<double> rotations;
  if (rotation != 0.0) rotations = {rotation, rotation, 0.0};
  return BasisSpec::make({dx, dy, dz}, {transverse, transverse, p.omega}, p.m, p.hbar,
                         std::move(rotations));
}

TensorOperator model2_full_operator(const ModelTwoParams& p, const BasisSpec& basis) {
  p.validate();
  basis.validate();
  require_modes(basis, 3, "model 2");
  require_units(basis, p.m, p.hbar);
  const auto x = TensorOperator::position(basis, 0);
  const auto y = TensorOperator::position(basis, 1);
  const auto z = TensorOperator::position(basis, 2);
  const auto px = TensorOperator::momentum(basis, 0);
  const auto py = TensorOperator::momentum(basis, 1);
  const auto pz = TensorOperator::momentum(basis, 2);
  const double a = p.q * p.B / (2.0 * p.c);
  // Kinetic momenta in the symmetric gauge A = (-By/2, Bx/2, 0) with iB.
  const auto pi_x = px + Complex(0.0, a) * y;
  const auto pi_y = py - Complex(0.0, a) * x;
  const double inv2m = 1.0 / (2.0 * p.m);
  const double spring = 0.5 * p.m * p.omega * p.omega;
  // Orbital moment mu_lz = q L_z / (2 m c).
  const double mu_coeff = p.q / (2.0 * p.m * p.c);
  return Complex(inv2m) * (square(pi_x) + square(pi_y) + square(pz)) +
         Complex(spring) * (square(x) + square(y) + square(z)) +
         Complex(0.0, mu_coeff * p.B) * TensorOperator::lz(basis);
}

TensorOperator model2_reduced_operator(const ModelTwoParams& p, const BasisSpec& basis) {
  p.validate();
  basis.validate();
  require_modes(basis, 3, "model 2");
  require_units(basis, p.m, p.hbar);
  const auto x = TensorOperator::position(basis, 0);
  const auto y = TensorOperator::position(basis, 1);
  const auto z = TensorOperator::position(basis, 2);
  const auto px = TensorOperator::momentum(basis, 0);
  const auto py = TensorOperator::momentum(basis, 1);
  const auto pz = TensorOperator::momentum(basis, 2);
  const double inv2m = 1.0 / (2.0 * p.m);
  return Complex(inv2m) * (square(px) + square(py) + square(pz)) +
         Complex(0.5 * p.m * p.omega1_sq()) * (square(x) + square(y)) +
         Complex(0.5 * p.m * p.omega * p.omega) * square(z);
}

OperatorMatrix hamiltonian_model2_full(const ModelTwoParams& p, const BasisSpec& basis) {
  return model2_full_operator(p, basis).dense();
}

OperatorMatrix hamiltonian_model2_reduced(const ModelTwoParams& p, const BasisSpec& basis) {
  return model2_reduced_operator(p, basis).dense();
}

EigenResult model2_reduced_eigenvalues(const ModelTwoParams& p, const BasisSpec& basis,
                                       const SolverConfig& cfg) {
  const auto parts = model2_reduced_operator(p, basis).kronecker_sum_parts();
  return kronecker_sum_eigenvalues(parts, cfg);
}

ComplexVector pt_complete(const ComplexVector& values, double eps) {
  // A value whose partner is already present (counted with multiplicity) is
  // not duplicated.
  ComplexVector out = values;
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i].imag()) <= eps || used[i]) continue;
    used[i] = true;
    bool found = false;
    for (std::size_t j = 0; j < values.size() && !found; ++j)
      if (!used[j] && std::abs(values[j] - std::conj(values[i])) <= eps) used[j] = found = true;
    if (!found) out.push_back(std::conj(values[i]));
  }
  sort_spectrum(out);
  return out;
}

}  // namespace ptspectra
