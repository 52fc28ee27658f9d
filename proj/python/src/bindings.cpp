#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "config.hpp"
#include "pipeline.hpp"
#include "vecsturm/oracle.hpp"
#include "vecsturm/spectral.hpp"

namespace py = pybind11;
using namespace vecsturm;

namespace {

std::string regularity_name(Regularity r) {
  switch (r) {
    case Regularity::StronglyRegular: return "StronglyRegular";
    case Regularity::RegularNotStronglyRegular: return "RegularNotStronglyRegular";
    default: return "NotRegular";
  }
}

std::string case_name(CaseTag t) { return t == CaseTag::Case6 ? "Case6" : t == CaseTag::Case7 ? "Case7" : "None"; }

GammaPair gamma_of(const BoundaryConditionPair& bc) { return characteristic_roots(theta_coefficients(bc)); }

py::list solve(const MatrixPotential& q, const BoundaryConditionPair& bc, int k_min, int k_max, int n_start,
               int grid_intervals, double tol, unsigned threads, bool traces) {
  const auto gamma = gamma_of(bc);
  const auto labels = labels_for_range(k_min, k_max, n_start);
  const auto grid = uniform_grid(grid_intervals);
  std::vector<MatrixEigenpair> solved;
  {
    py::gil_scoped_release release;
    const auto base = unperturbed_spectrum(bc, gamma, labels, {}, threads);
    const auto pred = c_spectrum(mean_matrix(q));
    SolveOptions opts;
    opts.locate.newton_tol = tol;
    opts.trace_tol = tol;
    opts.threads = threads;
    solved = solve_range(q, bc, gamma, base, pred, labels, grid, opts);
  }
  py::list out;
  for (const auto& e : solved) {
    py::dict d;
    d["label"] = e.k;
    d["j"] = e.j;
    d["lambda"] = e.lambda;
    d["prediction"] = e.prediction;
    d["zero_count"] = e.zero_count;
    d["residual"] = e.det_residual;
    d["status"] = e.accepted() ? std::string("ok") : std::string(to_string(*e.status));
    if (traces && e.accepted()) {
      d["x"] = grid.x;
      d["psi"] = e.psi;
      d["psi_adj"] = e.psi_adj;
    }
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral toolkit for vector Sturm-Liouville operators with strongly regular boundary conditions";
  static py::exception<Error> error(m, "VecsturmError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<BoundaryConditionPair>(m, "Boundary")
      .def_static("dirichlet", &BoundaryConditionPair::dirichlet)
      .def_static("neumann", &BoundaryConditionPair::neumann)
      .def_static("quasiperiodic", &BoundaryConditionPair::quasiperiodic, py::arg("t"))
      .def_static(
          "_from_json",
          [](const std::string& text) {
            const auto j = nlohmann::json::parse(text);
            return BoundaryConditionPair(app::parse_boundary_row(j.at(0)), app::parse_boundary_row(j.at(1)));
          })
      .def("matrix", &BoundaryConditionPair::matrix, "2x4 matrix acting on (y(0), y'(0), y(1), y'(1))")
      .def("theta",
           [](const BoundaryConditionPair& bc) {
             const auto t = theta_coefficients(bc);
             return py::make_tuple(t.minus, t.zero, t.plus);
           })
      .def("case", [](const BoundaryConditionPair& bc) { return case_name(theta_coefficients(bc).tag); })
      .def("regularity",
           [](const BoundaryConditionPair& bc) { return regularity_name(classify(theta_coefficients(bc)).kind); })
      .def("discriminant", [](const BoundaryConditionPair& bc) { return classify(theta_coefficients(bc)).discriminant; })
      .def("gamma", [](const BoundaryConditionPair& bc) {
        const auto g = gamma_of(bc);
        return py::make_tuple(g.gamma[0], g.gamma[1]);
      });

  py::class_<MatrixPotential>(m, "Potential")
      .def_static("_from_json", [](const std::string& text) { return app::parse_potential(nlohmann::json::parse(text)); })
      .def_static("constant", &MatrixPotential::constant, py::arg("value"))
      .def_property_readonly("m", &MatrixPotential::dim)
      .def("__call__", &MatrixPotential::evaluate, py::arg("x"))
      .def("mean", [](const MatrixPotential& q) { return CMatrix(mean_matrix(q)); });

  m.def(
      "base_spectrum",
      [](const BoundaryConditionPair& bc, const std::vector<int>& labels) {
        const auto base = unperturbed_spectrum(bc, gamma_of(bc), labels);
        py::list out;
        for (const auto& p : base.pairs) {
          py::dict d;
          d["label"] = p.label;
          d["branch"] = p.branch;
          d["k"] = p.k;
          d["rho"] = p.rho;
          d["pairing"] = inner(p.phi, p.phi_adj);
          out.append(d);
        }
        return out;
      },
      py::arg("bc"), py::arg("labels"));

  m.def("characteristic_det", &characteristic_det, py::arg("q"), py::arg("bc"), py::arg("lam"), py::arg("tol") = 1e-10);

  m.def("solve", &solve, py::arg("q"), py::arg("bc"), py::arg("k_min"), py::arg("k_max"), py::arg("n_start") = 0,
        py::arg("grid") = 2048, py::arg("tol") = 1e-10, py::arg("threads") = 0, py::arg("traces") = false,
        "Matrix eigenpairs near the lattice rho_k + mu_j for |k| in [k_min, k_max].");

  m.def(
      "oracle",
      [](const MatrixPotential& q, const BoundaryConditionPair& bc, int intervals, int count, bool richardson) {
        std::vector<cplx> out;
        py::gil_scoped_release release;
        if (richardson) {
          for (const auto& mode : richardson_spectrum(q, bc, intervals, count)) out.push_back(mode.corrected);
        } else {
          for (const auto& mode : oracle_spectrum(q, bc, intervals, count).modes) out.push_back(mode.lambda);
        }
        return out;
      },
      py::arg("q"), py::arg("bc"), py::arg("intervals"), py::arg("count"), py::arg("richardson") = false,
      "Smallest-modulus eigenvalues of the finite difference discretization.");

  m.def(
      "run_stage",
      [](const std::string& stage, const std::string& config_path, std::optional<std::string> out) {
        std::ostringstream log, err;
        int status = 0;
        {
          py::gil_scoped_release release;
          try {
            auto config = app::load_config(config_path);
            app::apply_overrides(config, {out, std::nullopt, std::nullopt, std::nullopt});
            status = app::run_stage(stage, config, log, err);
          } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            status = app::exit_code(e.kind());
          }
        }
        return py::make_tuple(status, log.str(), err.str());
      },
      py::arg("stage"), py::arg("config"), py::arg("out") = py::none(),
      "Runs one CLI stage in process; returns (exit status, log, error line).");
}
