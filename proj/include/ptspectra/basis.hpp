#pragma once

#include <cstddef>
#include <vector>

namespace ptspectra {

// Truncated product basis of harmonic-oscillator number states.
//
// Mode i keeps the lowest dims[i] states of an oscillator with frequency
// scale_freqs[i]. `rotations` optionally holds a complex coordinate rotation
// x -> e^{i theta} x per mode (empty means an ordinary real basis); it
// exposes complex eigenvalues of Hamiltonians whose continuous spectrum hides
// them in the unrotated representation.
struct BasisSpec {
  std::vector<std::size_t> dims;
  std::vector<double> scale_freqs;
  double mass = 1.0;
  double hbar = 1.0;
  std::vector<double> rotations;

  // Validating constructor; throws Error(InvalidBasis).
  static BasisSpec make(std::vector<std::size_t> dims, std::vector<double> scale_freqs,
                        double mass = 1.0, double hbar = 1.0,
                        std::vector<double> rotations = {});

  std::size_t modes() const noexcept { return dims.size(); }
  double rotation(std::size_t mode) const noexcept {
    return mode < rotations.size() ? rotations[mode] : 0.0;
  }
  bool rotated() const noexcept;
  std::size_t total_dim() const noexcept;
  // Row-major flat index of a product state; the last mode varies fastest.
  std::size_t flat_index(const std::vector<std::size_t>& quanta) const;
  std::vector<std::size_t> quanta(std::size_t flat) const;

  void validate() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

}  // namespace ptspectra
