#include "ptspectra/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptspectra/error.hpp"
#include "ptspectra/families.hpp"

namespace ptspectra::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Dense diagonalization of the gauge-coupled model-2 matrix beyond this size
// takes minutes on one core; the reduced form is the intended route there.
constexpr std::size_t kMaxDenseFull = 4096;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_complex(Complex z) {
  std::string s = fmt_short(z.real());
  if (z.imag() != 0.0) s += (z.imag() < 0 ? " - " : " + ") + fmt_short(std::abs(z.imag())) + "i";
  return s;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::size_t> coarse_dims(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> out;
  for (auto d : dims) {
    if (d < 6) return {};
    out.push_back(d - 4);
  }
  return out;
}

// Highest mode index mentioned by the expression, plus one.
std::size_t expr_modes(const std::string& expr) {
  const auto nf = dsl::normalize(dsl::parse(expr, 3));
  std::size_t modes = 1;
  for (const auto& t : nf.terms)
    for (const auto& op : t.ops) modes = std::max(modes, op.mode + 1);
  return modes;
}

std::size_t model_modes(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::Model1: return 2;
    case ModelKind::Model2: return 3;
    case ModelKind::Expr: return cfg.dims.empty() ? expr_modes(cfg.expr) : cfg.dims.size();
  }
  return 0;
}

ParityVariant default_variant(std::size_t modes) {
  return modes == 3 ? ParityVariant::SpaceInversion3D : ParityVariant::P1;
}

BasisSpec expr_basis(const RunConfig& cfg, const std::vector<std::size_t>& dims) {
  std::vector<double> freqs = cfg.scale_freqs;
  if (freqs.empty()) freqs.assign(dims.size(), 1.0);
  const auto m = cfg.bindings.find("m");
  const auto hbar = cfg.bindings.find("hbar");
  return BasisSpec::make(dims, freqs, m == cfg.bindings.end() ? 1.0 : m->second,
                         hbar == cfg.bindings.end() ? 1.0 : hbar->second);
}

// Resolved basis choice for model 2 (Auto decided by the field strength).
ModelTwoBasis model2_choice(const RunConfig& cfg) {
  if (cfg.model2_basis != ModelTwoBasis::Auto) return cfg.model2_basis;
  return cfg.model2.omega1_sq() > 0.0 ? ModelTwoBasis::Auto : ModelTwoBasis::Rotated;
}

BasisSpec model2_basis_for(const RunConfig& cfg, const std::vector<std::size_t>& d) {
  switch (model2_choice(cfg)) {
    case ModelTwoBasis::Oscillator: return model2_basis(cfg.model2, d[0], d[1], d[2]);
    case ModelTwoBasis::Rotated: return model2_rotated_basis(cfg.model2, d[0], d[1], d[2]);
    case ModelTwoBasis::Auto: return model2_rotated_basis(cfg.model2, d[0], d[1], d[2], 0.0);
  }
  return model2_basis(cfg.model2, d[0], d[1], d[2]);
}

std::string describe_basis(const BasisSpec& b) {
  std::ostringstream os;
  os << "dims ";
  for (std::size_t i = 0; i < b.modes(); ++i) os << (i ? "x" : "") << b.dims[i];
  os << ", scales ";
  for (std::size_t i = 0; i < b.modes(); ++i) os << (i ? "," : "") << fmt_short(b.scale_freqs[i]);
  if (b.rotated()) {
    os << ", rotations ";
    for (std::size_t i = 0; i < b.modes(); ++i) os << (i ? "," : "") << fmt_short(b.rotation(i));
  }
  return os.str();
}

struct Computed {
  EigenResult result;
  std::string basis;
};

// Full spectrum of the configured Hamiltonian at the given dims.
Computed full_spectrum(const RunConfig& cfg, const std::vector<std::size_t>& dims) {
  switch (cfg.model) {
    case ModelKind::Model1: {
      const auto basis = model1_basis(cfg.model1, dims[0], dims[1]);
      return {eigenvalues(hamiltonian_model1(cfg.model1, basis), cfg.solver), describe_basis(basis)};
    }
    case ModelKind::Model2: {
      const auto basis = model2_basis_for(cfg, dims);
      Computed c{{}, describe_basis(basis)};
      if (cfg.model2_full) {
        c.result = eigenvalues(hamiltonian_model2_full(cfg.model2, basis), cfg.solver);
        c.basis += ", full form";
      } else {
        c.result = model2_reduced_eigenvalues(cfg.model2, basis, cfg.solver);
      }
      if (basis.rotated()) {
        c.result.values = pt_complete(c.result.values, kEpsReal * spectral_scale(c.result.values));
        c.result.converged.assign(c.result.values.size(), c.result.all_converged());
      }
      return c;
    }
    case ModelKind::Expr: {
      const auto basis = expr_basis(cfg, dims);
      const auto ast = dsl::parse(cfg.expr, dims.size());
      const auto op = dsl::compile_terms(ast, basis, cfg.bindings);
      Computed c{{}, describe_basis(basis)};
      if (op.is_kronecker_sum()) {
        const auto parts = op.kronecker_sum_parts();
        c.result = kronecker_sum_eigenvalues(parts, cfg.solver);
      } else {
        c.result = eigenvalues(op.dense(), cfg.solver);
      }
      return c;
    }
  }
  return {};
}

ComplexVector analytic_for(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::Model1: return analytic_levels_model1(cfg.model1, cfg.levels + 1);
    case ModelKind::Model2: return analytic_levels_model2(cfg.model2, cfg.levels + 1);
    case ModelKind::Expr: return {};
  }
  return {};
}

double nearest_distance(Complex z, const ComplexVector& pool) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : pool) best = std::min(best, std::abs(z - w));
  return best;
}

// Greedy one-to-one assignment of analytic values to rows, in row order.
void attach_analytic(std::vector<LevelRow>& rows, const ComplexVector& analytic) {
  std::vector<bool> used(analytic.size(), false);
  for (auto& row : rows) {
    if (!std::isfinite(row.numeric.real())) continue;
    std::size_t best = analytic.size();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < analytic.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(row.numeric - analytic[j]);
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    if (best < analytic.size()) {
      used[best] = true;
      row.analytic = analytic[best];
    }
  }
}

PhaseLabel classify_rows(const std::vector<LevelRow>& rows) {
  ComplexVector conv;
  for (const auto& row : rows)
    if (row.converged) conv.push_back(row.numeric);
  if (conv.empty())
    for (const auto& row : rows) conv.push_back(row.numeric);
  return classify(conv, spectral_scale(conv));
}

SpectrumReport model2_critical_report(const RunConfig& cfg) {
  SpectrumReport rep;
  rep.convergence_asserted = false;
  rep.note = "omega_1 = 0: the transverse motion is free, no discrete spectrum to converge";
  rep.basis = "none";
  const auto analytic = analytic_levels_model2(cfg.model2, cfg.levels + 1);
  for (std::size_t i = 0; i < cfg.levels && i < analytic.size(); ++i) {
    LevelRow row;
    row.numeric = {kNaN, kNaN};
    row.analytic = analytic[i];
    row.drift = kNaN;
    rep.rows.push_back(row);
  }
  rep.phase.kind = PhaseKind::Critical;
  return rep;
}

SpectrumReport model2_rotated_report(const RunConfig& cfg, const std::vector<std::size_t>& dims) {
  SpectrumReport rep;
  const std::array<std::size_t, 3> d{dims[0], dims[1], dims[2]};
  const auto lv = model2_converged_levels(cfg.model2, d, kModelTwoDriftTol, cfg.solver);
  rep.basis = describe_basis(model2_rotated_basis(cfg.model2, d[0], d[1], d[2])) +
              ", per-mode converged levels";
  rep.note = "levels kept where each one-mode value drifts < " + fmt_short(kModelTwoDriftTol) +
             " relative between dims and dims-4";
  const auto cut = lowest_levels(lv.values, cfg.levels);
  const auto coarse =
      model2_reduced_eigenvalues(cfg.model2, model2_rotated_basis(cfg.model2, d[0] - 4, d[1] - 4, d[2] - 4),
                                 cfg.solver);
  const auto rough = pt_complete(coarse.values, kEpsReal * spectral_scale(coarse.values));
  const double scale = spectral_scale(cut);
  for (std::size_t i = 0; i < cfg.levels && i < cut.size(); ++i) {
    LevelRow row;
    row.numeric = cut[i];
    row.drift = nearest_distance(cut[i], rough);
    row.converged = row.drift <= kModelTwoDriftTol * scale;
    rep.rows.push_back(row);
  }
  while (rep.rows.size() < cfg.levels) {
    LevelRow row;
    row.numeric = {kNaN, kNaN};
    row.drift = kNaN;
    rep.rows.push_back(row);
  }
  attach_analytic(rep.rows, analytic_levels_model2(cfg.model2, cfg.levels + 1));
  ComplexVector conv;
  for (const auto& row : rep.rows)
    if (row.converged) conv.push_back(row.numeric);
  if (conv.empty()) conv = cut;
  rep.phase = classify(conv, spectral_scale(conv));
  return rep;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot open output file " + path);
  f << content;
  if (!f) throw Error(ErrorKind::InvalidInput, "write failed for " + path);
}

json config_json(const RunConfig& cfg) {
  json j;
  j["model"] = to_string(cfg.model);
  switch (cfg.model) {
    case ModelKind::Model1:
      j["params"] = {{"m", cfg.model1.m},
                     {"hbar", cfg.model1.hbar},
                     {"omega_x", cfg.model1.omega_x},
                     {"omega_y", cfg.model1.omega_y},
                     {"lambda", cfg.model1.lambda}};
      break;
    case ModelKind::Model2: {
      j["params"] = {{"m", cfg.model2.m},         {"hbar", cfg.model2.hbar}, {"q", cfg.model2.q},
                     {"c", cfg.model2.c},         {"omega", cfg.model2.omega},
                     {"B", cfg.model2.B}};
      const char* names[] = {"auto", "oscillator", "rotated"};
      j["basis"] = names[static_cast<int>(cfg.model2_basis)];
      j["form"] = cfg.model2_full ? "full" : "reduced";
      break;
    }
    case ModelKind::Expr:
      j["expr"] = cfg.expr;
      j["bindings"] = cfg.bindings;
      j["scale_freqs"] = cfg.scale_freqs;
      break;
  }
  j["dims"] = cfg.resolved_dims();
  j["levels"] = cfg.levels;
  j["format"] = cfg.format == OutputFormat::Json ? "json" : "csv";
  j["out"] = cfg.out;
  j["solver"] = {{"max_sweeps", cfg.solver.max_sweeps},
                 {"deflation_eps", cfg.solver.deflation_eps},
                 {"shift", cfg.solver.shift_strategy == ShiftStrategy::Wilkinson ? "wilkinson"
                                                                                  : "rayleigh"},
                 {"tol_resid", cfg.solver.tol_resid},
                 {"split_blocks", cfg.solver.split_blocks},
                 {"real_arithmetic", cfg.solver.real_arithmetic}};
  j["jobs"] = cfg.resolved_jobs();
  if (cfg.variant) j["variant"] = to_string(*cfg.variant);
  return j;
}

// ---------------------------------------------------------------------------
// check-analytic

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  bool skipped = false;
};

// P is a signed permutation in the number basis; returns max |P conj(H) P - H|.
double pt_commutator_defect(const OperatorMatrix& h, const OperatorMatrix& parity) {
  const std::size_t n = h.dim();
  std::vector<std::size_t> perm(n);
  std::vector<Complex> sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (parity(i, j) != Complex{}) {
        perm[i] = j;
        sign[i] = parity(i, j);
        break;
      }
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // (P conj(H) P)_ij = s_i conj(H_{perm i, perm^-1 j}) s'_j; P is an involution here.
      const Complex v = sign[i] * std::conj(h(perm[i], perm[j])) * sign[j];
      worst = std::max(worst, std::abs(v - h(i, j)));
    }
  return worst;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<Check> checks_model1(const RunConfig& cfg) {
  const auto& p = cfg.model1;
  const auto dims = cfg.resolved_dims();
  const auto nm = normal_modes(p);
  std::vector<Check> out;

  {
    const Complex sum = nm.C1_sq + nm.C2_sq;
    const Complex prod = nm.C1_sq * nm.C2_sq;
    const Complex want_prod = p.omega_x * p.omega_x * p.omega_y * p.omega_y +
                              p.lambda * p.lambda / (p.m * p.m);
    const double err = std::max(std::abs(sum - nm.omega_plus_sq), std::abs(prod - want_prod));
    out.push_back({"sum rule C1^2 + C2^2 = omega_+^2, C1^2 C2^2 = omega_x^2 omega_y^2 + lambda^2/m^2",
                   err < 1e-12 * std::max(1.0, std::abs(want_prod)), "error " + sci(err)});
  }
  {
    double worst = 0.0;
    std::string what;
    if (nm.regime == ModeRegime::Complex || nm.regime == ModeRegime::Singular) {
      for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b)
          worst = std::max(worst, std::abs(spectrum_model1(p, a, b) - std::conj(spectrum_model1(p, b, a))));
      what = "E(n1,n2) = conj E(n2,n1)";
    } else {
      for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b) worst = std::max(worst, std::abs(spectrum_model1(p, a, b).imag()));
      what = "analytic levels real";
    }
    out.push_back({"conjugacy (" + what + ")", worst < 1e-12, "max defect " + sci(worst)});
  }
  if (nm.alpha && nm.beta && nm.k) {
    const Complex a2 = *nm.alpha * *nm.alpha, b2 = *nm.beta * *nm.beta;
    const double err = std::max(std::abs(a2 + b2 - 1.0), std::abs(a2 - b2 - *nm.k));
    out.push_back({"alpha^2 + beta^2 = 1, alpha^2 - beta^2 = k", err < 1e-12, "error " + sci(err)});
  } else {
    out.push_back({"alpha^2 + beta^2 = 1, alpha^2 - beta^2 = k", true,
                   std::string("k undefined in the ") + to_string(nm.regime) + " regime", true});
  }

  // Numeric side: full spectrum at dims and dims - 4.
  const auto basis = model1_basis(p, dims[0], dims[1]);
  const auto h = hamiltonian_model1(p, basis);
  const auto parity = parity_matrix(ParityVariant::P1, basis);
  {
    const double d = pt_commutator_defect(h, parity);
    out.push_back({"P1 conj(H) P1 = H", d < 1e-12 * std::max(1.0, h.matrix().max_abs()), "defect " + sci(d)});
  }
  const auto fine = eigen_decompose_lowest(h.matrix(), cfg.levels, cfg.solver);
  const auto cd = coarse_dims(dims);
  ComplexVector rough;
  if (!cd.empty()) rough = eigenvalues(hamiltonian_model1(p, model1_basis(p, cd[0], cd[1])), cfg.solver).values;
  const std::size_t n = std::min(cfg.levels, fine.values.size());
  ComplexVector low(fine.values.begin(), fine.values.begin() + static_cast<std::ptrdiff_t>(n));
  const double scale = spectral_scale(low);
  ComplexVector conv;
  std::vector<std::size_t> conv_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rough.empty() && nearest_distance(low[i], rough) < kEpsReal * scale) {
      conv.push_back(low[i]);
      conv_idx.push_back(i);
    }
  }
  const auto label = classify(conv.empty() ? low : conv, scale);
  {
    const auto analytic = analytic_levels_model1(p, cfg.levels + 2);
    const double err = conv.empty() ? kNaN : match_distance(conv, analytic);
    out.push_back({"numeric vs analytic levels (" + std::to_string(conv.size()) + " converged of " +
                       std::to_string(n) + ")",
                   !conv.empty() && err < 1e-7, "max error " + sci(err)});
  }
  if (p.omega_x == p.omega_y && p.lambda != 0.0) {
    out.push_back({"isotropic implies Broken", label.kind == PhaseKind::Broken,
                   std::string("label ") + to_string(label.kind) + ", max |Im| " + sci(label.max_abs_im)});
  } else {
    out.push_back({"isotropic implies Broken", true, "not isotropic with lambda != 0", true});
  }
  {
    double worst_real = 0.0;
    double min_complex = std::numeric_limits<double>::infinity();
    std::size_t complex_count = 0;
    for (auto i : conv_idx) {
      const double r = pt_residual((*fine.vectors)[i], parity);
      if (std::abs(low[i].imag()) <= kEpsReal * scale) {
        worst_real = std::max(worst_real, r);
      } else {
        min_complex = std::min(min_complex, r);
        ++complex_count;
      }
    }
    out.push_back({"PT residual < 1e-6 for real-eigenvalue states", !conv_idx.empty() && worst_real < 1e-6,
                   "max " + sci(worst_real)});
    if (complex_count)
      out.push_back({"PT residual > 0.05 for complex-eigenvalue states", min_complex > 0.05,
                     "min " + sci(min_complex) + " over " + std::to_string(complex_count)});
  }
  return out;
}

std::vector<Check> checks_model2(const RunConfig& cfg) {
  const auto& p = cfg.model2;
  std::vector<Check> out;
  {
    const auto b = model2_basis(p, 6, 6, 4);
    const double d = max_abs_diff(hamiltonian_model2_full(p, b).matrix(), hamiltonian_model2_reduced(p, b).matrix());
    out.push_back({"full and reduced operators agree entry-wise", d < 1e-10, "max diff " + sci(d)});
  }
  {
    // Dense full form against the Kronecker-sum reduced form on a small basis.
    RunConfig small = cfg;
    const std::vector<std::size_t> d{10, 10, 6};
    const auto basis = model2_basis_for(small, d);
    auto full = eigenvalues(hamiltonian_model2_full(p, basis), cfg.solver).values;
    auto red = model2_reduced_eigenvalues(p, basis, cfg.solver).values;
    const std::size_t n = std::min<std::size_t>(20, full.size());
    ComplexVector a(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
    const double err = match_distance(a, red);
    out.push_back({"full vs reduced spectra (lowest 20, " + describe_basis(basis) + ")",
                   err < 1e-8 * std::max(1.0, spectral_scale(a)), "max diff " + sci(err)});
  }
  {
    const auto b = model2_basis(p, 6, 6, 4);
    const auto h = hamiltonian_model2_reduced(p, b);
    const double d = pt_commutator_defect(h, parity_matrix(ParityVariant::SpaceInversion3D, b));
    out.push_back({"SI3D conj(H) SI3D = H", d < 1e-12 * std::max(1.0, h.matrix().max_abs()), "defect " + sci(d)});
  }
  const double w1sq = p.omega1_sq();
  if (w1sq > 0.0) {
    RunConfig c = cfg;
    c.model2_basis = ModelTwoBasis::Auto;
    c.model2_full = false;
    const auto rep = compute_spectrum(c);
    const Complex want = spectrum_model2(p, 0, 0, 0);
    const double err = rep.rows.empty() ? kNaN : std::abs(rep.rows[0].numeric - want);
    out.push_back({"ground level matches (nx+ny+1) hbar omega_1 + hbar omega/2", err < 1e-7,
                   "numeric " + fmt_complex(rep.rows[0].numeric) + ", error " + sci(err)});
    // Real symmetric in the oscillator basis: real eigenvectors of definite parity.
    const auto b = model2_basis(p, 8, 8, 6);
    const auto h = hamiltonian_model2_reduced(p, b);
    const auto dec = eigen_decompose_lowest(h.matrix(), 10, cfg.solver);
    const auto parity = parity_matrix(ParityVariant::SpaceInversion3D, b);
    double worst = 0.0;
    for (const auto& v : *dec.vectors) worst = std::max(worst, pt_residual(v, parity));
    out.push_back({"PT residual < 1e-6 below the critical field", worst < 1e-6, "max " + sci(worst)});
  } else if (w1sq < 0.0) {
    const std::array<std::size_t, 3> d{24, 24, 12};
    const auto lv = model2_converged_levels(p, d, kModelTwoDriftTol, cfg.solver);
    const Complex want = spectrum_model2(p, 0, 0, 0, +1);
    double err = kNaN;
    if (!lv.values.empty()) {
      err = std::max(nearest_distance(want, lv.values), nearest_distance(std::conj(want), lv.values));
    }
    out.push_back({"lowest pair matches the analytic conjugate pair", err < 1e-6, "error " + sci(err)});
    const double eps = 1e-6 * spectral_scale(lv.values);
    const auto pairing = pair_conjugates(lv.values, eps);
    out.push_back({"complex levels come in conjugate pairs", pairing.unpaired.empty() && !pairing.pairs.empty(),
                   std::to_string(pairing.pairs.size()) + " pairs, " + std::to_string(pairing.unpaired.size()) +
                       " unpaired"});
  } else {
    out.push_back({"critical field reported as Critical", true, "omega_1 = 0", true});
  }
  return out;
}

// ---------------------------------------------------------------------------
// argument parsing

struct Cli {
  std::string model = "model1";
  std::optional<double> lambda, omega_x, omega_y, mass, hbar, b_field, omega, charge, light;
  std::string dims;
  std::size_t levels = 10;
  std::string format = "csv";
  std::string out;
  std::string expr;
  std::vector<std::string> binds;
  std::string scale_freqs;
  std::string param;
  std::optional<double> lo, hi;
  std::size_t steps = 11;
  double tol = 1e-6;
  std::size_t jobs = 0;
  std::string basis = "auto";
  std::string form = "reduced";
  std::string variant;
  std::size_t max_sweeps = 0;
  std::string shift = "wilkinson";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw Error(ErrorKind::InvalidInput, "bad number for " + what + ": '" + s + "'");
  return v;
}

RunConfig to_config(const Cli& c) {
  RunConfig cfg;
  if (c.model == "model1") cfg.model = ModelKind::Model1;
  else if (c.model == "model2") cfg.model = ModelKind::Model2;
  else if (c.model == "expr") cfg.model = ModelKind::Expr;
  else throw Error(ErrorKind::InvalidInput, "unknown model '" + c.model + "'");
  if (!c.expr.empty() && cfg.model != ModelKind::Expr) {
    if (c.model != "model1") throw Error(ErrorKind::InvalidInput, "--expr needs --model expr");
    cfg.model = ModelKind::Expr;  // --expr alone selects the expression model
  }

  auto& m1 = cfg.model1;
  auto& m2 = cfg.model2;
  if (c.lambda) m1.lambda = *c.lambda;
  if (c.omega_x) m1.omega_x = *c.omega_x;
  if (c.omega_y) m1.omega_y = *c.omega_y;
  if (c.mass) m1.m = m2.m = *c.mass;
  if (c.hbar) m1.hbar = m2.hbar = *c.hbar;
  if (c.b_field) m2.B = *c.b_field;
  if (c.omega) m2.omega = *c.omega;
  if (c.charge) m2.q = *c.charge;
  if (c.light) m2.c = *c.light;

  if (cfg.model == ModelKind::Model1 && (c.b_field || c.omega || c.charge || c.light))
    throw Error(ErrorKind::InvalidInput, "model-2 flag given for model1");
  if (cfg.model == ModelKind::Model2 && (c.lambda || c.omega_x || c.omega_y))
    throw Error(ErrorKind::InvalidInput, "model-1 flag given for model2");

  if (!c.dims.empty())
    for (const auto& t : split(c.dims, ',')) {
      const double v = parse_double(t, "--dims");
      if (v < 1 || v != std::floor(v)) throw Error(ErrorKind::InvalidInput, "--dims entries must be positive integers");
      cfg.dims.push_back(static_cast<std::size_t>(v));
    }
  cfg.levels = c.levels;
  if (c.format == "csv") cfg.format = OutputFormat::Csv;
  else if (c.format == "json") cfg.format = OutputFormat::Json;
  else throw Error(ErrorKind::InvalidInput, "unknown format '" + c.format + "'");
  cfg.out = c.out;
  cfg.expr = c.expr;
  for (const auto& b : c.binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::InvalidInput, "--bind expects name=value, got '" + b + "'");
    cfg.bindings[b.substr(0, eq)] = parse_double(b.substr(eq + 1), "--bind " + b.substr(0, eq));
  }
  if (!c.scale_freqs.empty())
    for (const auto& t : split(c.scale_freqs, ',')) cfg.scale_freqs.push_back(parse_double(t, "--scale-freqs"));
  cfg.jobs = c.jobs;
  if (c.basis == "auto") cfg.model2_basis = ModelTwoBasis::Auto;
  else if (c.basis == "oscillator") cfg.model2_basis = ModelTwoBasis::Oscillator;
  else if (c.basis == "rotated") cfg.model2_basis = ModelTwoBasis::Rotated;
  else throw Error(ErrorKind::InvalidInput, "unknown basis '" + c.basis + "'");
  if (c.form == "full") cfg.model2_full = true;
  else if (c.form != "reduced") throw Error(ErrorKind::InvalidInput, "unknown form '" + c.form + "'");
  if (!c.variant.empty()) {
    cfg.variant = parse_parity(c.variant);
    if (!cfg.variant) throw Error(ErrorKind::InvalidInput, "unknown parity variant '" + c.variant + "'");
  }
  cfg.solver.max_sweeps = c.max_sweeps;
  if (c.shift == "wilkinson") cfg.solver.shift_strategy = ShiftStrategy::Wilkinson;
  else if (c.shift == "rayleigh") cfg.solver.shift_strategy = ShiftStrategy::Rayleigh;
  else throw Error(ErrorKind::InvalidInput, "unknown shift '" + c.shift + "'");
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// commands

void print_spectrum(const RunConfig& cfg, const SpectrumReport& rep, std::ostream& out) {
  out << "# " << to_string(cfg.model) << "  basis: " << rep.basis << "\n";
  if (!rep.note.empty()) out << "# " << rep.note << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%5s  %-34s  %-34s  %10s  %10s  %s\n", "level", "numeric", "analytic",
                "abs_diff", "drift", "converged");
  out << line;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    const bool have = std::isfinite(r.numeric.real());
    const std::string num = have ? fmt_complex(r.numeric) : "-";
    const std::string ana = r.analytic ? fmt_complex(*r.analytic) : "-";
    const std::string diff = r.analytic && have ? sci(std::abs(r.numeric - *r.analytic)) : "-";
    const std::string drift = std::isfinite(r.drift) ? sci(r.drift) : "-";
    std::snprintf(line, sizeof line, "%5zu  %-34s  %-34s  %10s  %10s  %s\n", i, num.c_str(), ana.c_str(),
                  diff.c_str(), drift.c_str(), r.converged ? "yes" : "no");
    out << line;
  }
  out << "phase " << to_string(rep.phase.kind) << "  max|Im| " << sci(rep.phase.max_abs_im) << "  evidence "
      << rep.phase.evidence_count << "\n";
}

std::string spectrum_csv(const SpectrumReport& rep) {
  std::string s = "level,re,im,analytic_re,analytic_im,abs_diff,drift,converged\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    const Complex a = r.analytic.value_or(Complex{kNaN, kNaN});
    const double diff = r.analytic ? std::abs(r.numeric - a) : kNaN;
    s += std::to_string(i) + "," + fmt17(r.numeric.real()) + "," + fmt17(r.numeric.imag()) + "," +
         fmt17(a.real()) + "," + fmt17(a.imag()) + "," + fmt17(diff) + "," + fmt17(r.drift) + "," +
         (r.converged ? "1" : "0") + "\n";
  }
  return s;
}

std::string spectrum_json(const RunConfig& cfg, const SpectrumReport& rep) {
  json j;
  j["config"] = config_json(cfg);
  j["basis"] = rep.basis;
  j["note"] = rep.note;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["re"] = number(r.numeric.real());
    row["im"] = number(r.numeric.imag());
    if (r.analytic) {
      row["analytic"] = {number(r.analytic->real()), number(r.analytic->imag())};
      row["abs_diff"] = number(std::abs(r.numeric - *r.analytic));
    }
    row["drift"] = number(r.drift);
    row["converged"] = r.converged;
    rows.push_back(row);
  }
  j["levels"] = rows;
  j["phase"] = {{"kind", to_string(rep.phase.kind)},
                {"max_abs_im", rep.phase.max_abs_im},
                {"evidence_count", rep.phase.evidence_count}};
  return j.dump(2) + "\n";
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto rep = compute_spectrum(cfg);
  if (!cfg.out.empty()) {
    write_file(cfg.out, cfg.format == OutputFormat::Json ? spectrum_json(cfg, rep) : spectrum_csv(rep));
    print_spectrum(cfg, rep, out);
  } else if (cfg.format == OutputFormat::Json) {
    out << spectrum_json(cfg, rep);
  } else {
    print_spectrum(cfg, rep, out);
  }
  if (!rep.solver_converged) {
    err << "error: QR iteration did not converge within the sweep budget\n";
    return kExitFailure;
  }
  if (rep.convergence_asserted && !rep.all_converged()) {
    err << "warning: some requested levels did not converge (drift against dims - 4)\n";
    return kExitUnconverged;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param, double lo, double hi, std::size_t steps,
              std::ostream& out, std::ostream& err) {
  const auto records = run_sweep(cfg, param, lo, hi, steps);
  const std::string csv = sweep_csv(records, cfg.levels);
  if (cfg.out.empty()) {
    out << (cfg.format == OutputFormat::Json ? sweep_json(cfg, param, records) : csv);
  } else {
    namespace fs = std::filesystem;
    const fs::path path(cfg.out);
    fs::path csv_path = path;
    if (cfg.format == OutputFormat::Json) {
      write_file(path.string(), sweep_json(cfg, param, records));
      csv_path.replace_extension(".csv");
    }
    write_file(csv_path.string(), csv);
    fs::path gp = path;
    gp.replace_extension(".gp");
    write_file(gp.string(), gnuplot_script(csv_path.filename().string(), param, cfg.levels));
    out << "wrote " << records.size() << " records to " << path.string();
    if (csv_path != path) out << " (csv " << csv_path.string() << ")";
    out << ", plot script " << gp.string() << "\n";
  }
  std::size_t bad = 0;
  for (const auto& r : records)
    if (r.convergence_asserted && !r.converged) ++bad;
  if (bad) {
    err << "warning: " << bad << " of " << records.size() << " grid points have unconverged levels\n";
    return kExitUnconverged;
  }
  return kExitOk;
}

int cmd_critical(const RunConfig& cfg, const std::string& param, double lo, double hi, double tol,
                 std::ostream& out, std::ostream& err) {
  const auto base = make_family(cfg, param);
  // find_critical re-evaluates the endpoints; memoize so each point costs one solve.
  auto cache = std::make_shared<std::map<double, FamilyPoint>>();
  HamiltonianFamily family = [base, cache](double v) {
    auto it = cache->find(v);
    if (it == cache->end()) it = cache->emplace(v, base(v)).first;
    return it->second;
  };
  const auto at_lo = classify_point(family(lo)).kind;
  const auto at_hi = classify_point(family(hi)).kind;
  bool reversed = false;
  if (at_lo == PhaseKind::Broken && at_hi == PhaseKind::Unbroken) {
    reversed = true;
  } else if (!(at_lo == PhaseKind::Unbroken && at_hi == PhaseKind::Broken)) {
    err << "error: bracket [" << fmt_short(lo) << ", " << fmt_short(hi) << "] does not straddle a transition ("
        << param << "=" << fmt_short(lo) << " is " << to_string(at_lo) << ", " << param << "=" << fmt_short(hi)
        << " is " << to_string(at_hi) << ")\n";
    return kExitBracket;
  }
  CriticalResult res;
  if (reversed) {
    HamiltonianFamily mirror = [family, lo, hi](double v) { return family(lo + hi - v); };
    res = find_critical(mirror, lo, hi, tol);
    res.estimate = lo + hi - res.estimate;
    const double a = lo + hi - res.hi, b = lo + hi - res.lo;
    res.lo = a;
    res.hi = b;
  } else {
    res = find_critical(family, lo, hi, tol);
  }
  out << "parameter " << param << "\n";
  out << "estimate " << fmt17(res.estimate) << "\n";
  out << "bracket " << fmt17(res.lo) << " " << fmt17(res.hi) << "\n";
  out << "evaluations " << res.evaluations << "\n";
  if (const auto a = analytic_critical(cfg, param)) {
    out << "analytic " << fmt17(*a) << "\n";
    out << "relative_error " << sci(std::abs(res.estimate - *a) / std::max(std::abs(*a), 1e-300)) << "\n";
  }
  return kExitOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  std::vector<Check> checks;
  if (cfg.model == ModelKind::Model1) checks = checks_model1(cfg);
  else if (cfg.model == ModelKind::Model2) checks = checks_model2(cfg);
  else throw Error(ErrorKind::InvalidInput, "check-analytic needs a built-in model");
  std::size_t passed = 0, counted = 0;
  for (const auto& c : checks) {
    if (c.skipped) {
      out << "SKIP " << c.name << ": " << c.detail << "\n";
      continue;
    }
    ++counted;
    if (c.pass) ++passed;
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  out << passed << "/" << counted << " properties passed\n";
  return passed == counted ? kExitOk : kExitFailure;
}

int cmd_dsl_eval(RunConfig cfg, std::ostream& out, std::ostream& err) {
  if (cfg.expr.empty()) throw Error(ErrorKind::InvalidInput, "dsl-eval needs --expr");
  cfg.model = ModelKind::Expr;
  const std::size_t modes = model_modes(cfg);
  const auto ast = dsl::parse(cfg.expr, modes);
  const auto nf = dsl::normalize(ast);
  out << "modes " << modes << "\n";
  out << "normal form: " << dsl::print(dsl::to_ast(nf)) << "\n";
  const auto params = dsl::parameters(ast);
  out << "parameters:";
  for (const auto& p : params) out << " " << p;
  out << (params.empty() ? " none\n" : "\n");
  const auto variant = cfg.variant.value_or(default_variant(modes));
  const auto report = dsl::pt_check(ast, variant);
  out << "PT check (" << to_string(variant) << "T): " << (report.symmetric ? "symmetric" : "not symmetric") << "\n";
  if (report.normalized_difference) out << "PT(H) - H = " << dsl::print(*report.normalized_difference) << "\n";
  std::vector<std::string> missing;
  for (const auto& p : params)
    if (!cfg.bindings.count(p)) missing.push_back(p);
  if (!missing.empty()) {
    out << "spectrum skipped: unbound";
    for (const auto& m : missing) out << " " << m;
    out << "\n";
    return kExitOk;
  }
  return cmd_spectrum(cfg, out, err);
}

void print_parse_error(const dsl::ParseError& e, const std::string& src, std::ostream& err) {
  err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
  const auto span = e.span();
  err << "  " << src << "\n  " << std::string(std::min(span.begin, src.size()), ' ')
      << std::string(std::max<std::size_t>(1, span.end - span.begin), '^') << "\n";
}

}  // namespace

const char* to_string(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::Model1: return "model1";
    case ModelKind::Model2: return "model2";
    case ModelKind::Expr: return "expr";
  }
  return "?";
}

std::vector<std::size_t> RunConfig::resolved_dims() const {
  if (!dims.empty()) return dims;
  switch (model) {
    case ModelKind::Model1: return {40, 40};
    case ModelKind::Model2: return {24, 24, 12};
    case ModelKind::Expr: {
      const std::size_t n = expr_modes(expr);
      return std::vector<std::size_t>(n, n == 3 ? 12 : 40);
    }
  }
  return {};
}

std::size_t RunConfig::resolved_jobs() const {
  if (jobs) return jobs;
  if (const char* env = std::getenv("PT_SPECTRA_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void RunConfig::validate() const {
  if (model == ModelKind::Expr && expr.empty()) throw Error(ErrorKind::InvalidInput, "expr model needs --expr");
  // Syntax problems are reported before anything that depends on the basis.
  if (model == ModelKind::Expr) dsl::parse(expr, 3);
  if (model == ModelKind::Model1) model1.validate();
  if (model == ModelKind::Model2) model2.validate();
  const auto d = resolved_dims();
  const std::size_t modes = model == ModelKind::Expr ? d.size() : (model == ModelKind::Model1 ? 2u : 3u);
  if (d.size() != modes)
    throw Error(ErrorKind::InvalidInput, std::string("--dims needs ") + std::to_string(modes) + " entries for " +
                                             to_string(model));
  std::size_t total = 1;
  for (auto n : d) {
    if (n < 2) throw Error(ErrorKind::InvalidInput, "every dim must be at least 2");
    total *= n;
  }
  if (model == ModelKind::Expr && d.size() > 3) throw Error(ErrorKind::InvalidInput, "at most 3 modes");
  if (!scale_freqs.empty() && scale_freqs.size() != d.size())
    throw Error(ErrorKind::InvalidInput, "--scale-freqs needs one entry per mode");
  if (levels == 0) throw Error(ErrorKind::InvalidInput, "--levels must be positive");
  if (levels > total) throw Error(ErrorKind::InvalidInput, "--levels exceeds the basis size");
  if (model == ModelKind::Model2 && model2_full && total > kMaxDenseFull)
    throw Error(ErrorKind::InvalidInput, "--form full limited to " + std::to_string(kMaxDenseFull) +
                                             " basis states; use smaller --dims");
  solver.validate(total);
}

void set_parameter(RunConfig& cfg, const std::string& name, double value) {
  const auto bad = [&] {
    return Error(ErrorKind::InvalidInput,
                 "parameter '" + name + "' does not belong to " + std::string(to_string(cfg.model)));
  };
  switch (cfg.model) {
    case ModelKind::Model1: {
      auto& p = cfg.model1;
      if (name == "lambda") p.lambda = value;
      else if (name == "omega_x" || name == "omega-x") p.omega_x = value;
      else if (name == "omega_y" || name == "omega-y") p.omega_y = value;
      else if (name == "m" || name == "mass") p.m = value;
      else if (name == "hbar") p.hbar = value;
      else throw bad();
      return;
    }
    case ModelKind::Model2: {
      auto& p = cfg.model2;
      if (name == "B" || name == "b" || name == "b-field" || name == "b_field") p.B = value;
      else if (name == "omega") p.omega = value;
      else if (name == "m" || name == "mass") p.m = value;
      else if (name == "hbar") p.hbar = value;
      else if (name == "q" || name == "charge") p.q = value;
      else if (name == "c" || name == "light-speed") p.c = value;
      else throw bad();
      return;
    }
    case ModelKind::Expr: {
      const auto names = dsl::parameters(dsl::parse(cfg.expr, model_modes(cfg)));
      if (name != "m" && name != "hbar" && std::find(names.begin(), names.end(), name) == names.end())
        throw bad();
      cfg.bindings[name] = value;
      return;
    }
  }
}

std::string default_parameter(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::Model1: return "lambda";
    case ModelKind::Model2: return "B";
    case ModelKind::Expr: {
      const auto names = dsl::parameters(dsl::parse(cfg.expr, model_modes(cfg)));
      if (names.empty()) throw Error(ErrorKind::InvalidInput, "expression has no parameter to vary");
      return names.front();
    }
  }
  return {};
}

std::optional<double> analytic_critical(const RunConfig& cfg, const std::string& param) {
  if (cfg.model == ModelKind::Model1 && param == "lambda") return critical_coupling(cfg.model1);
  if (cfg.model == ModelKind::Model2) {
    if (param == "B" || param == "b" || param == "b-field" || param == "b_field") return critical_field(cfg.model2);
    if (param == "omega") return cfg.model2.cyclotron() / 2.0;
  }
  return std::nullopt;
}

bool SpectrumReport::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const LevelRow& r) { return r.converged; });
}

SpectrumReport compute_spectrum(const RunConfig& cfg) {
  cfg.validate();
  const auto dims = cfg.resolved_dims();
  if (cfg.model == ModelKind::Model2 && !cfg.model2_full) {
    if (cfg.model2.omega1_sq() == 0.0 && cfg.model2_basis == ModelTwoBasis::Auto) return model2_critical_report(cfg);
    if (model2_choice(cfg) == ModelTwoBasis::Rotated) {
      if (coarse_dims(dims).empty()) throw Error(ErrorKind::InvalidInput, "rotated model-2 basis needs dims >= 6");
      return model2_rotated_report(cfg, dims);
    }
  }

  const auto fine = full_spectrum(cfg, dims);
  SpectrumReport rep;
  rep.basis = fine.basis;
  const auto& values = fine.result.values;
  const std::size_t n = std::min(cfg.levels, values.size());
  for (std::size_t i = 0; i < n; ++i)
    if (!fine.result.converged[i]) rep.solver_converged = false;

  const auto cd = coarse_dims(dims);
  ComplexVector rough;
  if (cd.empty()) rep.note = "dims below 6: no convergence check possible";
  else rough = full_spectrum(cfg, cd).result.values;

  ComplexVector low(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n));
  const double scale = spectral_scale(low);
  for (std::size_t i = 0; i < n; ++i) {
    LevelRow row;
    row.numeric = values[i];
    row.drift = rough.empty() ? kNaN : nearest_distance(values[i], rough);
    row.converged = !rough.empty() && row.drift < kEpsReal * scale;
    rep.rows.push_back(row);
  }
  attach_analytic(rep.rows, analytic_for(cfg));
  rep.phase = classify_rows(rep.rows);
  return rep;
}

std::vector<SweepRecord> run_sweep(const RunConfig& cfg, const std::string& param, double lo, double hi,
                                   std::size_t steps) {
  if (steps == 0) throw Error(ErrorKind::InvalidInput, "--steps must be positive");
  if (!(lo <= hi)) throw Error(ErrorKind::InvalidInput, "--lo must not exceed --hi");
  {
    RunConfig probe = cfg;
    set_parameter(probe, param, lo);
    probe.validate();
  }
  std::vector<SweepRecord> records(steps);
  std::vector<std::exception_ptr> errors(steps);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < steps; k = next++) {
      try {
        const double v = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
        RunConfig c = cfg;
        set_parameter(c, param, v);
        const auto rep = compute_spectrum(c);
        SweepRecord& r = records[k];
        r.param = v;
        r.phase = rep.phase.kind;
        r.max_abs_im = rep.phase.max_abs_im;
        r.converged = rep.all_converged() && rep.solver_converged;
        r.convergence_asserted = rep.convergence_asserted;
        r.levels.assign(cfg.levels, Complex{kNaN, kNaN});
        for (std::size_t i = 0; i < rep.rows.size() && i < cfg.levels; ++i) r.levels[i] = rep.rows[i].numeric;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(cfg.resolved_jobs(), steps);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::stable_sort(records.begin(), records.end(),
                   [](const SweepRecord& a, const SweepRecord& b) { return a.param < b.param; });
  return records;
}

HamiltonianFamily make_family(const RunConfig& cfg, const std::string& param) {
  cfg.validate();
  {
    RunConfig probe = cfg;
    set_parameter(probe, param, 0.0);
  }
  const auto dims = cfg.resolved_dims();
  switch (cfg.model) {
    case ModelKind::Model1: {
      ModelOneAt at = [cfg, param](double v) {
        RunConfig c = cfg;
        set_parameter(c, param, v);
        return c.model1;
      };
      return model1_family(at, dims[0], dims[1], cfg.levels, cfg.solver);
    }
    case ModelKind::Model2: {
      ModelTwoAt at = [cfg, param](double v) {
        RunConfig c = cfg;
        set_parameter(c, param, v);
        return c.model2;
      };
      return model2_family(at, {dims[0], dims[1], dims[2]}, cfg.levels, cfg.solver);
    }
    case ModelKind::Expr:
      return [cfg, param, dims](double v) {
        RunConfig c = cfg;
        set_parameter(c, param, v);
        const auto res = full_spectrum(c, dims).result;
        FamilyPoint point;
        point.levels = lowest_levels(res.values, c.levels);
        point.scale = spectral_scale(point.levels);
        return point;
      };
  }
  return {};
}

std::string sweep_csv(const std::vector<SweepRecord>& records, std::size_t levels) {
  std::string s = "param,phase,max_abs_im";
  for (std::size_t i = 0; i < levels; ++i) s += ",re_" + std::to_string(i) + ",im_" + std::to_string(i);
  s += "\n";
  for (const auto& r : records) {
    s += fmt17(r.param) + "," + to_string(r.phase) + "," + fmt17(r.max_abs_im);
    for (std::size_t i = 0; i < levels; ++i) {
      const Complex z = i < r.levels.size() ? r.levels[i] : Complex{kNaN, kNaN};
      s += "," + fmt17(z.real()) + "," + fmt17(z.imag());
    }
    s += "\n";
  }
  return s;
}

std::string sweep_json(const RunConfig& cfg, const std::string& param, const std::vector<SweepRecord>& records) {
  json j;
  j["config"] = config_json(cfg);
  j["config"]["param"] = param;
  json recs = json::array();
  for (const auto& r : records) {
    json levels = json::array();
    for (const auto& z : r.levels) levels.push_back({number(z.real()), number(z.imag())});
    recs.push_back({{"param", r.param},
                    {"phase", to_string(r.phase)},
                    {"max_abs_im", number(r.max_abs_im)},
                    {"converged", r.converged},
                    {"levels", levels}});
  }
  j["records"] = recs;
  j["analytic"] = json::object();
  if (const auto a = analytic_critical(cfg, param)) j["analytic"]["critical"] = *a;
  return j.dump(2) + "\n";
}

std::string gnuplot_script(const std::string& csv_name, const std::string& param, std::size_t levels) {
  std::ostringstream g;
  g << "# pt-spectra sweep over " << param << "\n"
    << "# run: gnuplot -p <this file>\n"
    << "set datafile separator ','\n"
    << "set datafile missing 'nan'\n"
    << "set key outside right\n"
    << "set multiplot layout 2,1\n"
    << "set xlabel '" << param << "'\n"
    << "set ylabel 'max |Im E|'\n"
    << "plot '" << csv_name << "' using 1:3 with linespoints title 'max |Im E|'\n"
    << "set ylabel 'Re E'\n"
    << "plot ";
  for (std::size_t i = 0; i < levels; ++i) {
    g << (i ? ", \\\n     " : "") << "'" << csv_name << "' using 1:" << 4 + 2 * i << " with lines title 'Re E_" << i
      << "'";
  }
  g << "\nunset multiplot\n";
  return g.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Cli c;
  CLI::App app{"Spectra and PT phase structure of non-Hermitian oscillator Hamiltonians", "pt-spectra"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  app.add_option("--model", c.model, "model1 | model2 | expr")->capture_default_str();
  app.add_option("--lambda", c.lambda, "model1 coupling");
  app.add_option("--omega-x", c.omega_x, "model1 x frequency");
  app.add_option("--omega-y", c.omega_y, "model1 y frequency");
  app.add_option("--mass", c.mass, "particle mass");
  app.add_option("--hbar", c.hbar, "reduced Planck constant");
  app.add_option("--b-field", c.b_field, "model2 field strength B");
  app.add_option("--omega", c.omega, "model2 oscillator frequency");
  app.add_option("--charge", c.charge, "model2 charge q");
  app.add_option("--light-speed", c.light, "model2 speed of light c");
  app.add_option("--dims", c.dims, "basis size per mode, comma separated");
  app.add_option("--levels", c.levels, "number of lowest levels")->capture_default_str();
  app.add_option("--format", c.format, "csv | json")->capture_default_str();
  app.add_option("--out", c.out, "output file");
  app.add_option("--expr", c.expr, "operator expression (selects --model expr)");
  app.add_option("--bind", c.binds, "parameter binding name=value (repeatable)");
  app.add_option("--scale-freqs", c.scale_freqs, "expr basis scale frequency per mode");
  app.add_option("--param", c.param, "parameter to vary");
  app.add_option("--lo", c.lo, "lower end of the parameter range");
  app.add_option("--hi", c.hi, "upper end of the parameter range");
  app.add_option("--steps", c.steps, "sweep grid points")->capture_default_str();
  app.add_option("--tol", c.tol, "critical search tolerance")->capture_default_str();
  app.add_option("--jobs", c.jobs, "sweep worker threads (0: PT_SPECTRA_JOBS or all cores)");
  app.add_option("--basis", c.basis, "model2 basis: auto | oscillator | rotated")->capture_default_str();
  app.add_option("--form", c.form, "model2 form: reduced | full")->capture_default_str();
  app.add_option("--variant", c.variant, "parity variant P1 | P2 | P3 | SI3D");
  app.add_option("--max-sweeps", c.max_sweeps, "QR sweep budget (0: 30 x dim)");
  app.add_option("--shift", c.shift, "wilkinson | rayleigh")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "Lowest levels, analytic comparison and phase label");
  auto* sweep = app.add_subcommand("sweep", "Phase and levels over a parameter grid");
  auto* critical = app.add_subcommand("critical", "Bisection for the PT-breaking threshold");
  auto* check = app.add_subcommand("check-analytic", "Invariant checks against closed forms");
  auto* dsl_eval = app.add_subcommand("dsl-eval", "Normal form, PT check and spectrum of an expression");
  for (auto* s : {spectrum, sweep, critical, check, dsl_eval}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  RunConfig cfg;
  std::string param;
  try {
    cfg = to_config(c);
    if (*sweep || *critical) {
      param = c.param.empty() ? default_parameter(cfg) : c.param;
      RunConfig probe = cfg;
      set_parameter(probe, param, cfg.model == ModelKind::Model1 ? cfg.model1.lambda : 0.0);
      if (!c.lo || !c.hi) throw Error(ErrorKind::InvalidInput, "--lo and --hi are required");
      if (*critical && !(*c.lo < *c.hi)) throw Error(ErrorKind::InvalidInput, "--lo must be below --hi");
      if (*sweep && !(*c.lo <= *c.hi)) throw Error(ErrorKind::InvalidInput, "--lo must not exceed --hi");
      if (*sweep && c.steps == 0) throw Error(ErrorKind::InvalidInput, "--steps must be positive");
      if (*critical && !(c.tol > 0.0)) throw Error(ErrorKind::InvalidInput, "--tol must be positive");
    }
    if (*check && cfg.model == ModelKind::Expr)
      throw Error(ErrorKind::InvalidInput, "check-analytic needs --model model1 or model2");
    if (*dsl_eval && cfg.expr.empty()) throw Error(ErrorKind::InvalidInput, "dsl-eval needs --expr");
  } catch (const dsl::ParseError& e) {
    print_parse_error(e, c.expr, err);
    return kExitUsage;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(cfg, out, err);
    if (*check) return cmd_check(cfg, out);
    if (*dsl_eval) return cmd_dsl_eval(cfg, out, err);
    if (*sweep) return cmd_sweep(cfg, param, *c.lo, *c.hi, c.steps, out, err);
    if (*critical) return cmd_critical(cfg, param, *c.lo, *c.hi, c.tol, out, err);
  } catch (const dsl::ParseError& e) {
    print_parse_error(e, c.expr, err);
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::Bracket) return kExitBracket;
    if (e.kind() == ErrorKind::Binding) return kExitUsage;
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ptspectra::cli
