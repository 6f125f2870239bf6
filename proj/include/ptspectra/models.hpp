#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ptspectra/basis.hpp"
#include "ptspectra/eigensolver.hpp"
#include "ptspectra/matrix.hpp"
#include "ptspectra/operators.hpp"

namespace ptspectra {

// 2D anisotropic oscillator with the coupling i*lambda*x*y.
struct ModelOneParams {
  double m = 1.0;
  double hbar = 1.0;
  double omega_x = 1.0;
  double omega_y = 2.0;
  double lambda = 0.0;

  void validate() const;  // throws Error(InvalidInput)
};

// Exceptional: |lambda| equals the critical coupling exactly (k^-1 = 0, the
// two normal modes coalesce and k itself is undefined).
enum class ModeRegime { Real, Complex, Singular, Exceptional };

const char* to_string(ModeRegime r) noexcept;

struct NormalModeData {
  double omega_plus_sq = 0.0;   // omega_x^2 + omega_y^2
  double omega_minus_sq = 0.0;  // omega_y^2 - omega_x^2
  std::optional<Complex> k;     // absent in the Singular and Exceptional regimes
  Complex k_inv;                // principal root of 1 - 4 lambda^2 / (m^2 omega_-^4)
  Complex C1_sq, C2_sq;
  Complex C1, C2;               // principal square roots
  std::optional<Complex> alpha, beta;  // sqrt((1 + k)/2), sqrt((1 - k)/2)
  ModeRegime regime = ModeRegime::Real;
};

NormalModeData normal_modes(const ModelOneParams& p);
double critical_coupling(const ModelOneParams& p);
Complex spectrum_model1(const ModelOneParams& p, std::size_t n1, std::size_t n2);

// All analytic levels with n1, n2 < nmax, sorted by (Re, Im).
ComplexVector analytic_levels_model1(const ModelOneParams& p, std::size_t nmax);

// Basis with scale frequencies (omega_x, omega_y) and the model's m, hbar.
BasisSpec model1_basis(const ModelOneParams& p, std::size_t dx, std::size_t dy);
TensorOperator model1_operator(const ModelOneParams& p, const BasisSpec& basis);
OperatorMatrix hamiltonian_model1(const ModelOneParams& p, const BasisSpec& basis);

// 3D isotropic oscillator of charge q in the imaginary field iB along z.
struct ModelTwoParams {
  double m = 1.0;
  double hbar = 1.0;
  double q = 1.0;
  double c = 1.0;
  double omega = 1.0;
  double B = 0.0;

  void validate() const;  // throws Error(InvalidInput)
  double cyclotron() const { return q * B / (m * c); }
  // omega_1^2 = omega^2 - omega_c^2 / 4; negative above the critical field.
  double omega1_sq() const;
};

double critical_field(const ModelTwoParams& p);

// Analytic level (n_x + n_y + 1) hbar omega_1 + (n_z + 1/2) hbar omega.
// Above the critical field omega_1 = branch * i * omega_tilde, so branch = +1
// and -1 give the two members of each conjugate pair. branch is ignored when
// omega_1 is real.
Complex spectrum_model2(const ModelTwoParams& p, std::size_t nx, std::size_t ny, std::size_t nz,
                        int branch = +1);

// Analytic levels with every quantum number below nmax (both branches when
// complex), sorted by (Re, Im).
ComplexVector analytic_levels_model2(const ModelTwoParams& p, std::size_t nmax);

// Basis with scale omega on all three modes and no rotation.
BasisSpec model2_basis(const ModelTwoParams& p, std::size_t dx, std::size_t dy, std::size_t dz);

// Basis adapted to the reduced problem: transverse scale |omega_1| (omega when
// omega_1 = 0) and longitudinal scale omega. `rotation` is applied to the two
// transverse modes only; it turns the inverted transverse oscillator above the
// critical field into a discrete set of resonances. With rotation = 0 and
// omega_1^2 > 0 the reduced Hamiltonian is diagonal in this basis.
inline constexpr double kModelTwoRotation = 0.39269908169872414;  // pi / 8
BasisSpec model2_rotated_basis(const ModelTwoParams& p, std::size_t dx, std::size_t dy,
                               std::size_t dz, double rotation = kModelTwoRotation);

TensorOperator model2_full_operator(const ModelTwoParams& p, const BasisSpec& basis);
TensorOperator model2_reduced_operator(const ModelTwoParams& p, const BasisSpec& basis);
OperatorMatrix hamiltonian_model2_full(const ModelTwoParams& p, const BasisSpec& basis);
OperatorMatrix hamiltonian_model2_reduced(const ModelTwoParams& p, const BasisSpec& basis);

// Eigenvalues of the reduced Hamiltonian through its Kronecker-sum structure:
// three small diagonalizations instead of one of size dx*dy*dz.
EigenResult model2_reduced_eigenvalues(const ModelTwoParams& p, const BasisSpec& basis,
                                       const SolverConfig& cfg = {});

// The rotation theta gives H(theta); H(-theta) = conj(H(theta)) for this
// real-coefficient Hamiltonian, so complex values of the rotated spectrum are
// completed with their conjugates. The result is sorted by (Re, Im).
ComplexVector pt_complete(const ComplexVector& values, double eps);

}  // namespace ptspectra
