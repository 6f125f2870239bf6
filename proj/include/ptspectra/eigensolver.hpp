#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ptspectra/matrix.hpp"
#include "ptspectra/operators.hpp"

namespace ptspectra {

enum class ShiftStrategy { Wilkinson, Rayleigh };

struct SolverConfig {
  // Total QR sweep budget; 0 selects 30 * dim.
  std::size_t max_sweeps = 0;
  // Subdiagonal entries below deflation_eps * (|h_ii| + |h_i+1,i+1|) are zeroed.
  double deflation_eps = 1e-13;
  ShiftStrategy shift_strategy = ShiftStrategy::Wilkinson;
  // Eigenvector acceptance: ||Av - lambda v|| <= tol_resid * ||A||_F.
  double tol_resid = 1e-9;
  // Diagonalize irreducible diagonal blocks separately when the sparsity
  // pattern decouples (e.g. conserved parities).
  bool split_blocks = true;
  // Run the real double-shift sweep when a block is diagonally similar to a
  // real matrix through quarter-turn phases i^k. Values only.
  bool real_arithmetic = true;

  std::size_t sweep_limit(std::size_t dim) const { return max_sweeps ? max_sweeps : 30 * dim; }
  void validate(std::size_t dim) const;
};

struct EigenResult {
  ComplexVector values;                              // sorted by (Re, Im)
  std::optional<std::vector<ComplexVector>> vectors;  // aligned with values
  std::size_t iterations = 0;
  std::vector<bool> converged;

  bool all_converged() const;
};

struct BalanceResult {
  ComplexMatrix matrix;         // D^{-1} A D
  std::vector<double> scaling;  // diagonal of D, powers of two
};

struct HessenbergResult {
  ComplexMatrix h;  // upper Hessenberg
  ComplexMatrix q;  // unitary, A = Q H Q^H
};

struct EigenvectorResult {
  ComplexVector vector;  // unit 2-norm
  double residual = 0.0;  // ||Av - lambda v|| / ||A||_F
  bool converged = false;
  std::size_t iterations = 0;
};

BalanceResult balance(const ComplexMatrix& a);
HessenbergResult hessenberg(const ComplexMatrix& a);

EigenResult eigenvalues(const ComplexMatrix& a, const SolverConfig& cfg = {});
EigenResult eigenvalues(const OperatorMatrix& a, const SolverConfig& cfg = {});
// Eigenvalues plus inverse-iteration eigenvectors for every value.
EigenResult eigen_decompose(const ComplexMatrix& a, const SolverConfig& cfg = {});
// All eigenvalues, with eigenvectors for the `count` lowest only: `vectors`
// then holds min(count, dim) entries aligned with the first values.
EigenResult eigen_decompose_lowest(const ComplexMatrix& a, std::size_t count,
                                   const SolverConfig& cfg = {});

EigenvectorResult eigenvector(const ComplexMatrix& a, Complex lambda, const SolverConfig& cfg = {});
EigenvectorResult eigenvector(const OperatorMatrix& a, Complex lambda, const SolverConfig& cfg = {});

// Inverse iteration with the Hessenberg reduction cached across calls.
class InverseIteration {
 public:
  explicit InverseIteration(const ComplexMatrix& a, SolverConfig cfg = {});
  EigenvectorResult solve(Complex lambda) const;

 private:
  ComplexMatrix a_;
  ComplexMatrix h_;
  ComplexMatrix q_;
  std::vector<double> scaling_;
  double norm_;
  SolverConfig cfg_;
};

// Spectrum of h_0 (x) I (x) ... + I (x) h_1 (x) ... + ...: all sums of the
// per-mode eigenvalues, sorted.
EigenResult kronecker_sum_eigenvalues(std::span<const ComplexMatrix> parts,
                                      const SolverConfig& cfg = {});

// Index sets of the irreducible diagonal blocks of a (connected components of
// its sparsity graph), each sorted ascending.
std::vector<std::vector<std::size_t>> decoupled_blocks(const ComplexMatrix& a);

void sort_spectrum(ComplexVector& values);
bool spectrum_less(const Complex& a, const Complex& b);

}  // namespace ptspectra
