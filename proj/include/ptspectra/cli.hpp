#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ptspectra/dsl.hpp"
#include "ptspectra/eigensolver.hpp"
#include "ptspectra/models.hpp"
#include "ptspectra/phase.hpp"

namespace ptspectra::cli {

// Process exit status of pt-spectra.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // solver failure or failed property
  kExitUnconverged = 2,  // some requested level did not converge
  kExitBracket = 3,      // critical search bracket does not straddle a transition
  kExitUsage = 64,       // bad flags or malformed expression
};

enum class ModelKind { Model1, Model2, Expr };
enum class OutputFormat { Csv, Json };
// Model-2 basis: Oscillator is scale omega on every mode; Rotated is the
// matched-scale basis with a transverse complex rotation; Auto picks the
// matched unrotated basis below the critical field and Rotated above it.
enum class ModelTwoBasis { Auto, Oscillator, Rotated };

const char* to_string(ModelKind k) noexcept;

struct RunConfig {
  ModelKind model = ModelKind::Model1;
  ModelOneParams model1;
  ModelTwoParams model2;
  std::string expr;
  dsl::Bindings bindings;
  std::vector<double> scale_freqs;  // expr basis; default 1 per mode
  std::vector<std::size_t> dims;    // empty selects the model default
  std::size_t levels = 10;
  OutputFormat format = OutputFormat::Csv;
  std::string out;
  SolverConfig solver;
  std::size_t jobs = 0;  // 0: PT_SPECTRA_JOBS, then hardware concurrency
  ModelTwoBasis model2_basis = ModelTwoBasis::Auto;
  bool model2_full = false;  // diagonalize the gauge-coupled form densely
  std::optional<ParityVariant> variant;

  std::vector<std::size_t> resolved_dims() const;
  std::size_t resolved_jobs() const;
  void validate() const;  // throws Error(InvalidInput)
};

// Sets a named parameter ("lambda", "B", "omega", ... or an expression
// binding). Throws Error(InvalidInput) for names the model does not have.
void set_parameter(RunConfig& cfg, const std::string& name, double value);
// Default sweep/critical parameter: lambda (model 1), B (model 2).
std::string default_parameter(const RunConfig& cfg);
// Closed-form critical value, when the model and parameter have one.
std::optional<double> analytic_critical(const RunConfig& cfg, const std::string& param);

struct LevelRow {
  Complex numeric;
  std::optional<Complex> analytic;
  double drift = 0.0;  // against the run at dims - 4 per mode
  bool converged = false;
};

struct SpectrumReport {
  std::vector<LevelRow> rows;
  PhaseLabel phase;
  std::string basis;  // human-readable description of the basis used
  std::string note;
  bool solver_converged = true;      // every QR block deflated within budget
  bool convergence_asserted = true;  // false where no discrete spectrum exists (omega_1 = 0)
  bool all_converged() const;
};

SpectrumReport compute_spectrum(const RunConfig& cfg);

struct SweepRecord {
  double param = 0.0;
  PhaseKind phase = PhaseKind::Unbroken;
  double max_abs_im = 0.0;
  ComplexVector levels;  // exactly cfg.levels entries; NaN where unavailable
  bool converged = false;
  bool convergence_asserted = true;
};

// Grid points are evaluated on a worker pool; the result is sorted by param.
std::vector<SweepRecord> run_sweep(const RunConfig& cfg, const std::string& param, double lo,
                                   double hi, std::size_t steps);

HamiltonianFamily make_family(const RunConfig& cfg, const std::string& param);

std::string sweep_csv(const std::vector<SweepRecord>& records, std::size_t levels);
std::string sweep_json(const RunConfig& cfg, const std::string& param,
                       const std::vector<SweepRecord>& records);
std::string gnuplot_script(const std::string& csv_name, const std::string& param,
                           std::size_t levels);

// Entry point shared by the pt-spectra binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ptspectra::cli
