#include "ptspectra/phase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ptspectra/eigensolver.hpp"
#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

ComplexMatrix sign_diagonal(std::size_t dim) {
  ComplexMatrix d(dim, dim);
  for (std::size_t n = 0; n < dim; ++n) d(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return d;
}

OperatorMatrix flip_modes(const BasisSpec& basis, const std::vector<std::size_t>& modes) {
  auto op = TensorOperator::identity(basis);
  for (auto m : modes) op = op * TensorOperator::local(basis, m, sign_diagonal(basis.dims[m]));
  return op.dense();
}

OperatorMatrix swap_modes(const BasisSpec& basis) {
  if (basis.dims[0] != basis.dims[1] || basis.scale_freqs[0] != basis.scale_freqs[1] ||
      basis.rotation(0) != basis.rotation(1))
    throw Error(ErrorKind::InvalidBasis,
                "P3 needs equal dims, scale frequencies and rotations on modes 0 and 1");
  const std::size_t d = basis.dims[0];
  ComplexMatrix s(d * d, d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) s(b * d + a, a * d + b) = 1.0;
  return {std::move(s), basis};
}

bool lower_equal(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

const char* to_string(PhaseKind k) noexcept {
  switch (k) {
    case PhaseKind::Unbroken: return "unbroken";
    case PhaseKind::Broken: return "broken";
    case PhaseKind::Critical: return "critical";
  }
  return "?";
}

const char* to_string(ParityVariant v) noexcept {
  switch (v) {
    case ParityVariant::P1: return "P1";
    case ParityVariant::P2: return "P2";
    case ParityVariant::P3: return "P3";
    case ParityVariant::SpaceInversion3D: return "SpaceInversion3D";
  }
  return "?";
}

std::optional<ParityVariant> parse_parity(std::string_view name) {
  if (lower_equal(name, "P1")) return ParityVariant::P1;
  if (lower_equal(name, "P2")) return ParityVariant::P2;
  if (lower_equal(name, "P3")) return ParityVariant::P3;
  if (lower_equal(name, "SpaceInversion3D") || lower_equal(name, "SI3D"))
    return ParityVariant::SpaceInversion3D;
  return std::nullopt;
}

OperatorMatrix parity_matrix(ParityVariant v, const BasisSpec& basis) {
  basis.validate();
  const auto modes = basis.modes();
  switch (v) {
    case ParityVariant::P1:
      return flip_modes(basis, {0});
    case ParityVariant::P2:
      if (modes < 2) throw Error(ErrorKind::InvalidBasis, "P2 needs at least two modes");
      return flip_modes(basis, {1});
    case ParityVariant::P3:
      if (modes != 2) throw Error(ErrorKind::InvalidBasis, "P3 is defined on 2-mode bases only");
      return swap_modes(basis);
    case ParityVariant::SpaceInversion3D:
      if (modes != 3)
        throw Error(ErrorKind::InvalidBasis, "SpaceInversion3D is defined on 3-mode bases only");
      return flip_modes(basis, {0, 1, 2});
  }
  throw Error(ErrorKind::InvalidInput, "unknown parity variant");
}

double spectral_scale(std::span<const Complex> spectrum) {
  double s = 0.0;
  for (const auto& z : spectrum) s = std::max(s, std::abs(z));
  return s > 0.0 ? s : 1.0;
}

PhaseLabel classify(std::span<const Complex> spectrum, double scale, double eps_real) {
  if (spectrum.empty()) throw Error(ErrorKind::InvalidInput, "classify: empty spectrum");
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidInput, "classify: scale must be positive");
  PhaseLabel label;
  label.evidence_count = spectrum.size();
  for (const auto& z : spectrum) label.max_abs_im = std::max(label.max_abs_im, std::abs(z.imag()));
  if (label.max_abs_im <= eps_real * scale) {
    label.kind = PhaseKind::Unbroken;
  } else if (label.max_abs_im > 10.0 * eps_real * scale) {
    label.kind = PhaseKind::Broken;
  } else {
    label.kind = PhaseKind::Critical;
  }
  return label;
}

ComplexVector lowest_levels(std::span<const Complex> sorted, std::size_t count) {
  std::size_t n = std::min(count, sorted.size());
  if (n > 0)
    while (n < sorted.size()) {
      const double last = sorted[n - 1].real();
      if (std::abs(sorted[n].real() - last) > 1e-8 * std::max(1.0, std::abs(last))) break;
      ++n;
    }
  return {sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n)};
}

ConjugatePairing pair_conjugates(std::span<const Complex> spectrum, double eps) {
  const std::size_t n = spectrum.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spectrum_less(spectrum[a], spectrum[b]);
  });
  ConjugatePairing out;
  std::vector<bool> used(n, false);
  for (auto i : order)
    if (std::abs(spectrum[i].imag()) <= eps) {
      out.reals.push_back(i);
      used[i] = true;
    }
  for (auto i : order) {
    if (used[i] || spectrum[i].imag() <= eps) continue;
    const Complex target = std::conj(spectrum[i]);
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (auto j : order) {  // (Re, Im) order makes the first minimum the tie-break winner
      if (used[j] || spectrum[j].imag() >= -eps) continue;
      const double d = std::abs(spectrum[j] - target);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[i] = true;
    if (best) {
      used[*best] = true;
      out.pairs.emplace_back(i, *best);
    } else {
      out.unpaired.push_back(i);
    }
  }
  for (auto i : order)
    if (!used[i]) out.unpaired.push_back(i);
  return out;
}

double pt_residual(std::span<const Complex> vec, const OperatorMatrix& parity) {
  if (vec.size() != parity.dim())
    throw Error(ErrorKind::InvalidInput, "pt_residual: vector length does not match operator");
  const double nv = norm2(vec);
  if (!(nv > 0.0)) throw Error(ErrorKind::InvalidInput, "pt_residual: zero vector");
  ComplexVector v(vec.begin(), vec.end());
  for (auto& z : v) z /= nv;
  ComplexVector cv(v.size());
  std::transform(v.begin(), v.end(), cv.begin(), [](Complex z) { return std::conj(z); });
  const auto w = parity.matrix() * std::span<const Complex>(cv);
  const double overlap = std::abs(dot(w, v));
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

PhaseLabel classify_point(const FamilyPoint& point, double eps_real) {
  if (point.exact) {
    PhaseLabel label;
    label.kind = *point.exact;
    label.evidence_count = point.levels.size();
    for (const auto& z : point.levels) label.max_abs_im = std::max(label.max_abs_im, std::abs(z.imag()));
    return label;
  }
  return classify(point.levels, point.scale, eps_real);
}

CriticalResult find_critical(const HamiltonianFamily& family, double lo, double hi, double tol,
                             double eps_real) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::InvalidInput, "find_critical: need finite lo < hi");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "find_critical: tol must be positive");
  CriticalResult res{0.0, lo, hi, 0};
  const auto at_lo = classify_point(family(lo), eps_real);
  const auto at_hi = classify_point(family(hi), eps_real);
  res.evaluations = 2;
  if (at_lo.kind != PhaseKind::Unbroken || at_hi.kind != PhaseKind::Broken)
    throw Error(ErrorKind::Bracket, std::string("bracket does not straddle a transition: ") +
                                        to_string(at_lo.kind) + " at lo, " + to_string(at_hi.kind) +
                                        " at hi");
  while (res.hi - res.lo > tol) {
    const double mid = 0.5 * (res.lo + res.hi);
    if (mid <= res.lo || mid >= res.hi) break;  // bracket at floating-point resolution
    const auto label = classify_point(family(mid), eps_real);
    ++res.evaluations;
    (label.kind == PhaseKind::Broken ? res.hi : res.lo) = mid;
  }
  res.estimate = 0.5 * (res.lo + res.hi);
  return res;
}

bool ConvergenceTable::all_converged() const {
  if (rows.empty()) return false;
  const auto& c = rows.back().converged;
  return !c.empty() && std::all_of(c.begin(), c.end(), [](bool b) { return b; });
}

ConvergenceTable convergence_study(const TruncatedFamily& family, std::span<const std::size_t> dims,
                                   std::size_t levels, double drift_tol) {
  for (std::size_t i = 1; i < dims.size(); ++i)
    if (dims[i] <= dims[i - 1])
      throw Error(ErrorKind::InvalidInput, "convergence_study: dims must be strictly increasing");
  ConvergenceTable table;
  table.levels = levels;
  table.drift_tol = drift_tol;
  ComplexVector previous;
  for (auto d : dims) {
    ComplexVector full = family(d);
    ConvergenceRow row;
    row.dim = d;
    row.levels.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(std::min(levels, full.size())));
    const double scale = spectral_scale(row.levels);
    for (const auto& z : row.levels) {
      double drift = std::numeric_limits<double>::quiet_NaN();
      if (!previous.empty()) {
        drift = std::numeric_limits<double>::infinity();
        for (const auto& w : previous) drift = std::min(drift, std::abs(z - w));
      }
      row.drift.push_back(drift);
      row.converged.push_back(!previous.empty() && drift < drift_tol * scale);
    }
    table.rows.push_back(std::move(row));
    previous = std::move(full);
  }
  return table;
}

double match_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (b.size() < a.size()) throw Error(ErrorKind::InvalidInput, "match_distance: b is shorter than a");
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a) {
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - b[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

}  // namespace ptspectra
