#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "ptspectra/eigensolver.hpp"
#include "ptspectra/models.hpp"
#include "ptspectra/phase.hpp"

namespace ptspectra {

using ModelOneAt = std::function<ModelOneParams(double)>;
using ModelTwoAt = std::function<ModelTwoParams(double)>;

// Lowest `levels` eigenvalues (pair-closed) of the dense model-1 matrix on a
// dx x dy basis. Truncation artifacts sit at the top of the spectrum, far
// above the lowest levels, so no per-point convergence pass is made.
HamiltonianFamily model1_family(ModelOneAt at, std::size_t dx, std::size_t dy, std::size_t levels,
                                SolverConfig cfg = {});

// Same indicator on the closed-form levels; no matrices involved.
HamiltonianFamily model1_analytic_family(ModelOneAt at, std::size_t levels);

struct ModelTwoLevels {
  ComplexVector values;  // converged, conjugate-completed, sorted by (Re, Im)
  std::array<std::size_t, 3> converged_per_mode{};
};

inline constexpr double kModelTwoDriftTol = 1e-6;

// Converged levels of the reduced model-2 Hamiltonian in the rotated basis.
// Each mode is diagonalized at its dim and at dim - 4; a one-mode eigenvalue
// is kept when its relative drift is below drift_tol, and the 3D levels are
// the sums of kept one-mode values.
ModelTwoLevels model2_converged_levels(const ModelTwoParams& p, std::array<std::size_t, 3> dims,
                                       double drift_tol = kModelTwoDriftTol, SolverConfig cfg = {},
                                       double rotation = kModelTwoRotation);

HamiltonianFamily model2_family(ModelTwoAt at, std::array<std::size_t, 3> dims, std::size_t levels,
                                SolverConfig cfg = {});

}  // namespace ptspectra
