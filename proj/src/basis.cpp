#include "ptspectra/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ptspectra/error.hpp"

namespace ptspectra {

BasisSpec BasisSpec::make(std::vector<std::size_t> dims, std::vector<double> scale_freqs,
                          double mass, double hbar, std::vector<double> rotations) {
  BasisSpec b{std::move(dims), std::move(scale_freqs), mass, hbar, std::move(rotations)};
  b.validate();
  return b;
}

std::size_t BasisSpec::total_dim() const noexcept {
  std::size_t n = dims.empty() ? 0 : 1;
  for (auto d : dims) n *= d;
  return n;
}

bool BasisSpec::rotated() const noexcept {
  for (double r : rotations)
    if (r != 0.0) return true;
  return false;
}

std::size_t BasisSpec::flat_index(const std::vector<std::size_t>& q) const {
  if (q.size() != dims.size())
    throw Error(ErrorKind::IndexOutOfRange, "quantum-number tuple has wrong length");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (q[i] >= dims[i]) throw Error(ErrorKind::IndexOutOfRange, "quantum number beyond truncation");
    flat = flat * dims[i] + q[i];
  }
  return flat;
}

std::vector<std::size_t> BasisSpec::quanta(std::size_t flat) const {
  std::vector<std::size_t> q(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    q[i] = flat % dims[i];
    flat /= dims[i];
  }
  return q;
}

void BasisSpec::validate() const {
  if (dims.empty() || dims.size() > 3)
    throw Error(ErrorKind::InvalidBasis, "basis must have 1, 2 or 3 modes");
  if (dims.size() != scale_freqs.size())
    throw Error(ErrorKind::InvalidBasis, "dims and scale_freqs lengths differ");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 2)
      throw Error(ErrorKind::InvalidBasis, "mode " + std::to_string(i) + " has dim < 2");
    if (!(scale_freqs[i] > 0.0) || !std::isfinite(scale_freqs[i]))
      throw Error(ErrorKind::InvalidBasis,
                  "mode " + std::to_string(i) + " scale frequency must be positive");
  }
  if (!(mass > 0.0) || !(hbar > 0.0))
    throw Error(ErrorKind::InvalidBasis, "mass and hbar must be positive");
  if (!rotations.empty() && rotations.size() != dims.size())
    throw Error(ErrorKind::InvalidBasis, "rotations must be empty or one per mode");
  // Beyond |theta| = pi/4 the rotated kinetic term changes half-plane and
  // the principal-branch continuation no longer holds.
  for (double r : rotations)
    if (!(std::abs(r) < std::numbers::pi / 4))
      throw Error(ErrorKind::InvalidBasis, "rotation angle must satisfy |theta| < pi/4");
}

}  // namespace ptspectra
