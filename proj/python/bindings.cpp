#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sforge/agp.hpp"
#include "sforge/digitized.hpp"
#include "sforge/dynamics.hpp"
#include "sforge/models.hpp"
#include "sforge/qsl.hpp"
#include "sforge/scenario.hpp"
#include "sforge/spectral.hpp"

namespace py = pybind11;
using namespace sforge;

namespace {

Matrix solve_and_assemble(const LinearCDSystem& s, Index dim) {
    if (s.identically_zero) return Matrix::Zero(dim, dim);
    return assemble_cd(s, solve_cd(s)).matrix();
}

// Runs a config given as JSON text; returns (summary JSON text, {file: (columns, rows)}).
py::tuple run_scenario(const std::string& config_text) {
    const auto cfg = scenario::ScenarioConfig::from_json(scenario::json::parse(config_text));
    const scenario::RunArtifacts art = scenario::run(cfg);
    py::dict tables;
    for (const auto& [name, t] : art.tables) tables[py::str(name)] = py::make_tuple(t.columns, t.rows);
    return py::make_tuple(art.summary.dump(), tables);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Counterdiabatic driving, fast-forward and speed-limit tools";
    m.attr("__version__") = SFORGE_VERSION;

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("hbar", &hbar);
    m.def("set_hbar", &set_hbar, py::arg("value"));
    m.def("pauli", [](const std::string& label) { return pauli_string(label); }, py::arg("label"));
    m.def("random_hermitian", &models::random_hermitian, py::arg("dim"), py::arg("seed"));

    m.def("exact_cd", [](const Matrix& h, const Matrix& dh) { return exact_cd(h, dh).matrix(); }, py::arg("h"), py::arg("dh"));
    m.def(
        "variational_cd",
        [](const Matrix& h, const Matrix& dh, int order) {
            return solve_and_assemble(variational_system(h, dh, order > 0 ? order : full_order(h, dh)), h.rows());
        },
        py::arg("h"), py::arg("dh"), py::arg("order") = 0, "order 0 means full order");
    m.def(
        "krylov_cd", [](const Matrix& h, const Matrix& dh) { return solve_and_assemble(krylov_system(krylov_chain(h, dh)), h.rows()); },
        py::arg("h"), py::arg("dh"));
    m.def(
        "krylov_coefficients", [](const Matrix& h, const Matrix& dh) { return krylov_chain(h, dh).b; }, py::arg("h"),
        py::arg("dh"));

    m.def("step_unitary", &step_unitary, py::arg("h"), py::arg("dt"));
    m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));
    m.def("standard_deviation", &standard_deviation, py::arg("x"), py::arg("psi"));
    m.def(
        "trotter_baseline",
        [](const Matrix& a, const Matrix& b, double T, const std::vector<int>& ms) {
            const DigitizationReport r = trotter_baseline(a, b, T, ms);
            std::vector<double> errors;
            for (const auto& p : r.points) errors.push_back(p.error);
            return py::make_tuple(errors, r.fit.skipped ? py::object(py::none()) : py::object(py::float_(r.fit.slope)));
        },
        py::arg("a"), py::arg("b"), py::arg("T"), py::arg("m_values"));

    m.def("run_scenario", &run_scenario, py::arg("config_json"));
}
