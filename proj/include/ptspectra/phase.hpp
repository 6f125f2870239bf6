#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ptspectra/basis.hpp"
#include "ptspectra/matrix.hpp"
#include "ptspectra/operators.hpp"

namespace ptspectra {

enum class PhaseKind { Unbroken, Broken, Critical };
const char* to_string(PhaseKind k) noexcept;

struct PhaseLabel {
  PhaseKind kind = PhaseKind::Unbroken;
  double max_abs_im = 0.0;
  std::optional<double> pt_residual_max;
  std::size_t evidence_count = 0;
};

enum class ParityVariant { P1, P2, P3, SpaceInversion3D };
const char* to_string(ParityVariant v) noexcept;
// Accepts P1, P2, P3, SpaceInversion3D (case-insensitive) and the short form SI3D.
std::optional<ParityVariant> parse_parity(std::string_view name);

struct ConjugatePairing {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // first has Im > 0
  std::vector<std::size_t> reals;
  std::vector<std::size_t> unpaired;
};

// Relative threshold on |Im| below which an eigenvalue counts as real.
inline constexpr double kEpsReal = 1e-8;

OperatorMatrix parity_matrix(ParityVariant v, const BasisSpec& basis);

// max |lambda| over the list; 1 for an all-zero list so thresholds stay finite.
double spectral_scale(std::span<const Complex> spectrum);

PhaseLabel classify(std::span<const Complex> spectrum, double scale, double eps_real = kEpsReal);

// The `count` lowest entries of a (Re, Im)-sorted spectrum, extended so that a
// conjugate pair is never split at the cutoff.
ComplexVector lowest_levels(std::span<const Complex> sorted, std::size_t count);

ConjugatePairing pair_conjugates(std::span<const Complex> spectrum, double eps);

// 1 - |<P conj(v), v>| for the normalized v; 0 for a PT eigenstate.
double pt_residual(std::span<const Complex> vec, const OperatorMatrix& parity);

// One point of a parameterized Hamiltonian family: the levels that feed the
// classifier and the scale the thresholds are relative to. `exact` overrides
// the numeric label where the family knows the answer analytically (only at
// a degenerate parameter value where the truncated problem is meaningless).
struct FamilyPoint {
  ComplexVector levels;
  double scale = 1.0;
  std::optional<PhaseKind> exact;
};
using HamiltonianFamily = std::function<FamilyPoint(double)>;

PhaseLabel classify_point(const FamilyPoint& point, double eps_real = kEpsReal);

struct CriticalResult {
  double estimate = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  std::size_t evaluations = 0;
};

// Bisection on the Broken / not-Broken indicator. Throws Error(Bracket) unless
// the family is Unbroken at lo and Broken at hi.
CriticalResult find_critical(const HamiltonianFamily& family, double lo, double hi, double tol,
                             double eps_real = kEpsReal);

// Full sorted spectrum at a given truncation size.
using TruncatedFamily = std::function<ComplexVector(std::size_t)>;

struct ConvergenceRow {
  std::size_t dim = 0;
  ComplexVector levels;
  std::vector<double> drift;     // NaN on the first row
  std::vector<bool> converged;   // false on the first row
};

struct ConvergenceTable {
  std::size_t levels = 0;
  double drift_tol = kEpsReal;
  std::vector<ConvergenceRow> rows;

  bool all_converged() const;  // every level of the last row
};

// Drift of each of the lowest `levels` eigenvalues against the nearest
// eigenvalue at the previous dim; converged when drift < drift_tol * scale.
ConvergenceTable convergence_study(const TruncatedFamily& family, std::span<const std::size_t> dims,
                                   std::size_t levels, double drift_tol = kEpsReal);

// Greedy one-to-one matching; returns the largest matched distance. Every
// entry of `a` is matched, so b.size() must be at least a.size().
double match_distance(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace ptspectra
