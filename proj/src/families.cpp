#include "ptspectra/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

std::vector<ComplexMatrix> reduced_parts(const ModelTwoParams& p, std::array<std::size_t, 3> dims,
                                         double rotation) {
  const auto basis = model2_rotated_basis(p, dims[0], dims[1], dims[2], rotation);
  return model2_reduced_operator(p, basis).kronecker_sum_parts();
}

}  // namespace

HamiltonianFamily model1_family(ModelOneAt at, std::size_t dx, std::size_t dy, std::size_t levels,
                                SolverConfig cfg) {
  return [at = std::move(at), dx, dy, levels, cfg](double v) {
    const auto p = at(v);
    const auto h = hamiltonian_model1(p, model1_basis(p, dx, dy));
    const auto res = eigenvalues(h, cfg);
    FamilyPoint point;
    point.levels = lowest_levels(res.values, levels);
    point.scale = spectral_scale(point.levels);
    return point;
  };
}

HamiltonianFamily model1_analytic_family(ModelOneAt at, std::size_t levels) {
  return [at = std::move(at), levels](double v) {
    const auto p = at(v);
    FamilyPoint point;
    point.levels = lowest_levels(analytic_levels_model1(p, levels + 1), levels);
    point.scale = spectral_scale(point.levels);
    return point;
  };
}

ModelTwoLevels model2_converged_levels(const ModelTwoParams& p, std::array<std::size_t, 3> dims,
                                       double drift_tol, SolverConfig cfg, double rotation) {
  std::array<std::size_t, 3> coarse{};
  for (std::size_t m = 0; m < 3; ++m) {
    if (dims[m] < 6) throw Error(ErrorKind::InvalidBasis, "model 2 convergence check needs dims >= 6");
    coarse[m] = dims[m] - 4;
  }
  const auto fine_parts = reduced_parts(p, dims, rotation);
  const auto coarse_parts = reduced_parts(p, coarse, rotation);

  ModelTwoLevels out;
  std::array<ComplexVector, 3> kept;
  for (std::size_t m = 0; m < 3; ++m) {
    const auto fine = eigenvalues(fine_parts[m], cfg);
    const auto rough = eigenvalues(coarse_parts[m], cfg);
    for (std::size_t i = 0; i < fine.values.size(); ++i) {
      if (!fine.converged[i]) continue;
      const Complex z = fine.values[i];
      double drift = std::numeric_limits<double>::infinity();
      for (const auto& w : rough.values) drift = std::min(drift, std::abs(z - w));
      if (drift <= drift_tol * std::abs(z)) kept[m].push_back(z);
    }
    out.converged_per_mode[m] = kept[m].size();
  }
  ComplexVector sums;
  for (const auto& a : kept[0])
    for (const auto& b : kept[1])
      for (const auto& c : kept[2]) sums.push_back(a + b + c);
  const double eps = kEpsReal * spectral_scale(sums);
  out.values = pt_complete(sums, eps);
  return out;
}

HamiltonianFamily model2_family(ModelTwoAt at, std::array<std::size_t, 3> dims, std::size_t levels,
                                SolverConfig cfg) {
  return [at = std::move(at), dims, levels, cfg](double v) {
    const auto p = at(v);
    FamilyPoint point;
    const auto lv = model2_converged_levels(p, dims, kModelTwoDriftTol, cfg);
    point.levels = lowest_levels(lv.values, levels);
    point.scale = spectral_scale(point.levels);
    // omega_1 = 0: the transverse motion is free and has no discrete levels.
    if (p.omega1_sq() == 0.0) point.exact = PhaseKind::Critical;
    if (point.levels.empty() && !point.exact)
      throw Error(ErrorKind::InvalidInput, "model 2: no converged levels at this truncation");
    return point;
  };
}

}  // namespace ptspectra
