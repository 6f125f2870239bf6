#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "ptspectra/cli.hpp"
#include "ptspectra/dsl.hpp"
#include "ptspectra/eigensolver.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/families.hpp"
#include "ptspectra/models.hpp"
#include "ptspectra/phase.hpp"

namespace py = pybind11;
using namespace ptspectra;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square 2-D array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  ComplexMatrix m(n, n);
  std::copy(a.data(), a.data() + n * n, m.data());
  return m;
}

ComplexArray to_array(const ComplexMatrix& m) {
  ComplexArray out({m.rows(), m.cols()});
  std::copy(m.data(), m.data() + m.rows() * m.cols(), out.mutable_data());
  return out;
}

ComplexArray to_array(const ComplexVector& v) {
  ComplexArray out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SolverConfig solver(const std::string& shift, std::size_t max_sweeps) {
  SolverConfig cfg;
  cfg.max_sweeps = max_sweeps;
  if (shift == "wilkinson")
    cfg.shift_strategy = ShiftStrategy::Wilkinson;
  else if (shift == "rayleigh")
    cfg.shift_strategy = ShiftStrategy::Rayleigh;
  else
    throw py::value_error("shift must be 'wilkinson' or 'rayleigh'");
  return cfg;
}

ParityVariant parity(const std::string& name) {
  const auto v = parse_parity(name);
  if (!v) throw py::value_error("unknown parity variant: " + name);
  return *v;
}

py::dict critical_dict(const CriticalResult& r) {
  py::dict d;
  d["estimate"] = r.estimate;
  d["lo"] = r.lo;
  d["hi"] = r.hi;
  d["evaluations"] = r.evaluations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectra and PT phase analysis of coupled non-Hermitian oscillators.";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def(
      "eigenvalues",
      [](const ComplexArray& a, const std::string& shift, std::size_t max_sweeps) {
        const auto r = eigenvalues(to_matrix(a), solver(shift, max_sweeps));
        return py::make_tuple(to_array(r.values), r.all_converged());
      },
      py::arg("a"), py::arg("shift") = "wilkinson", py::arg("max_sweeps") = 0,
      "Eigenvalues sorted by (Re, Im) and whether every one converged.");

  m.def(
      "eig",
      [](const ComplexArray& a) {
        const auto r = eigen_decompose(to_matrix(a));
        const std::size_t n = r.values.size();
        ComplexArray vecs({n, n});
        auto w = vecs.mutable_unchecked<2>();
        // Columns are eigenvectors, as in numpy.linalg.eig.
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < n; ++i) w(i, j) = (*r.vectors)[j][i];
        return py::make_tuple(to_array(r.values), vecs, r.all_converged());
      },
      py::arg("a"));

  m.def(
      "normal_modes",
      [](double m_, double hbar, double omega_x, double omega_y, double lam) {
        const auto d = normal_modes({m_, hbar, omega_x, omega_y, lam});
        py::dict out;
        out["C1_sq"] = d.C1_sq;
        out["C2_sq"] = d.C2_sq;
        out["C1"] = d.C1;
        out["C2"] = d.C2;
        out["k_inv"] = d.k_inv;
        out["k"] = d.k ? py::cast(*d.k) : py::none();
        out["regime"] = to_string(d.regime);
        return out;
      },
      py::arg("m") = 1.0, py::arg("hbar") = 1.0, py::arg("omega_x") = 1.0, py::arg("omega_y") = 2.0,
      py::arg("lam") = 0.0);

  m.def(
      "critical_coupling",
      [](double m_, double omega_x, double omega_y) { return critical_coupling({.m = m_, .omega_x = omega_x, .omega_y = omega_y}); },
      py::arg("m") = 1.0, py::arg("omega_x") = 1.0, py::arg("omega_y") = 2.0);

  m.def(
      "critical_field",
      [](double m_, double q, double c, double omega) {
        return critical_field({.m = m_, .q = q, .c = c, .omega = omega});
      },
      py::arg("m") = 1.0, py::arg("q") = 1.0, py::arg("c") = 1.0, py::arg("omega") = 1.0);

  m.def(
      "hamiltonian_model1",
      [](std::size_t dx, std::size_t dy, double m_, double hbar, double omega_x, double omega_y, double lam) {
        const ModelOneParams p{m_, hbar, omega_x, omega_y, lam};
        return to_array(hamiltonian_model1(p, model1_basis(p, dx, dy)).matrix());
      },
      py::arg("dx") = 20, py::arg("dy") = 20, py::arg("m") = 1.0, py::arg("hbar") = 1.0, py::arg("omega_x") = 1.0,
      py::arg("omega_y") = 2.0, py::arg("lam") = 0.0);

  m.def(
      "model1_levels",
      [](std::size_t nmax, double m_, double hbar, double omega_x, double omega_y, double lam) {
        return to_array(analytic_levels_model1({m_, hbar, omega_x, omega_y, lam}, nmax));
      },
      py::arg("nmax") = 4, py::arg("m") = 1.0, py::arg("hbar") = 1.0, py::arg("omega_x") = 1.0,
      py::arg("omega_y") = 2.0, py::arg("lam") = 0.0, "Closed-form levels for n1, n2 < nmax, sorted.");

  m.def(
      "model2_levels",
      [](double B, std::size_t nx, std::size_t ny, std::size_t nz, double omega) {
        const ModelTwoParams p{.omega = omega, .B = B};
        const auto lv = model2_converged_levels(p, {nx, ny, nz});
        return to_array(lv.values);
      },
      py::arg("B"), py::arg("nx") = 24, py::arg("ny") = 24, py::arg("nz") = 12, py::arg("omega") = 1.0,
      "Converged levels of the reduced model-2 Hamiltonian in the rotated basis.");

  m.def(
      "classify",
      [](const std::vector<Complex>& values) {
        return std::string(to_string(classify(values, spectral_scale(values)).kind));
      },
      py::arg("values"));

  m.def(
      "find_critical_model1",
      [](double lo, double hi, double tol, std::size_t dx, std::size_t dy, std::size_t levels, double omega_x,
         double omega_y) {
        const auto fam = model1_family(
            [=](double l) { return ModelOneParams{.omega_x = omega_x, .omega_y = omega_y, .lambda = l}; }, dx, dy,
            levels);
        py::gil_scoped_release release;
        return find_critical(fam, lo, hi, tol);
      },
      py::arg("lo") = 0.0, py::arg("hi") = 3.0, py::arg("tol") = 1e-6, py::arg("dx") = 40, py::arg("dy") = 40,
      py::arg("levels") = 10, py::arg("omega_x") = 1.0, py::arg("omega_y") = 2.0);

  m.def(
      "find_critical_model2",
      [](double lo, double hi, double tol, std::size_t nx, std::size_t ny, std::size_t nz, std::size_t levels,
         double omega) {
        const auto fam = model2_family([=](double b) { return ModelTwoParams{.omega = omega, .B = b}; },
                                       {nx, ny, nz}, levels);
        return find_critical(fam, lo, hi, tol);
      },
      py::arg("lo") = 0.0, py::arg("hi") = 4.0, py::arg("tol") = 1e-6, py::arg("nx") = 24, py::arg("ny") = 24,
      py::arg("nz") = 12, py::arg("levels") = 10, py::arg("omega") = 1.0);

  py::class_<CriticalResult>(m, "CriticalResult")
      .def_readonly("estimate", &CriticalResult::estimate)
      .def_readonly("lo", &CriticalResult::lo)
      .def_readonly("hi", &CriticalResult::hi)
      .def_readonly("evaluations", &CriticalResult::evaluations)
      .def("as_dict", &critical_dict)
      .def("__repr__", [](const CriticalResult& r) {
        std::ostringstream s;
        s.precision(12);
        s << "CriticalResult(estimate=" << r.estimate << ", lo=" << r.lo << ", hi=" << r.hi << ")";
        return s.str();
      });

  m.def(
      "normalize",
      [](const std::string& expr, std::size_t modes) { return dsl::print(dsl::to_ast(dsl::normalize(dsl::parse(expr, modes)))); },
      py::arg("expr"), py::arg("modes") = 2);

  m.def(
      "pt_check",
      [](const std::string& expr, std::size_t modes, const std::string& variant) {
        const auto rep = dsl::pt_check(dsl::parse(expr, modes), parity(variant));
        py::object diff = py::none();
        if (rep.normalized_difference) diff = py::str(dsl::print(*rep.normalized_difference));
        return py::make_tuple(rep.symmetric, diff);
      },
      py::arg("expr"), py::arg("modes") = 2, py::arg("variant") = "P1",
      "Whether PT maps the expression to itself, and the normalized PT(H) - H otherwise.");

  m.def(
      "compile_expr",
      [](const std::string& expr, std::vector<std::size_t> dims, std::vector<double> scale_freqs,
         const dsl::Bindings& bindings, double mass, double hbar) {
        if (scale_freqs.empty()) scale_freqs.assign(dims.size(), 1.0);
        const auto basis = BasisSpec::make(dims, scale_freqs, mass, hbar);
        return to_array(dsl::compile(dsl::parse(expr, dims.size()), basis, bindings).matrix());
      },
      py::arg("expr"), py::arg("dims"), py::arg("scale_freqs") = std::vector<double>{},
      py::arg("bindings") = dsl::Bindings{}, py::arg("mass") = 1.0, py::arg("hbar") = 1.0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"pt-spectra"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end in-process; returns (exit code, stdout, stderr).");
}
