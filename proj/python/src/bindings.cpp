#include "plaquefsi/scenario.hpp"
#include "plaquefsi/studies.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace plaquefsi;

namespace {

py::dict to_dict(const std::map<std::string, std::string>& m)
{
    py::dict d;
    for (const auto& [k, v] : m) {
        d[py::str(k)] = v;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Fluid-structure interaction with plaque growth";

    static py::handle config_error = py::exception<ConfigError>(m, "ConfigError", PyExc_ValueError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const ConfigError& e) {
            PyErr_SetString(config_error.ptr(), e.what());
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def("baseline_config", [] { return baseline_config().to_ini(); },
          "INI text of the baseline scenario.");

    m.def("check_config", [](const std::string& text) { return parse_config_string(text).to_ini(); },
          py::arg("text"), "Validate INI text and return it in normalized form; raises ConfigError.");

    m.def(
        "run",
        [](const std::string& text, const std::filesystem::path& directory) {
            const RunConfig cfg = parse_config_string(text);
            RunOutcome r;
            {
                py::gil_scoped_release release;
                r = run_scenario(cfg, directory);
            }
            py::dict out;
            out["exit_code"] = r.exit_code;
            out["directory"] = r.directory;
            out["summary"] = to_dict(r.summary);
            return out;
        },
        py::arg("text"), py::arg("directory"),
        "Run a scenario from INI text, writing artifacts into `directory`. Returns exit_code, directory, summary.");

    m.def(
        "mesh_summary",
        [](int n, double L, double Hf, double Hs) {
            const Mesh mesh = build_strip_mesh(L, Hf, Hs, n);
            py::dict d;
            d["vertices"] = mesh.num_vertices();
            d["cells"] = mesh.num_cells();
            d["interface_facets"] = mesh.facets_with_tag(FacetTag::Interface).size();
            d["h"] = mesh.h();
            return d;
        },
        py::arg("n"), py::arg("L") = 1.0, py::arg("H_f") = 0.5, py::arg("H_s") = 0.5);

    m.def(
        "assumption_report",
        [](double mu, int samples, double radius, std::uint64_t seed) {
            const AssumptionReport r = check_assumptions(EnergyDensity<2>(mu), samples, radius, seed);
            py::dict d;
            d["frame_indifference_violation"] = r.frame_indifference_violation;
            d["dw_identity_norm"] = r.dw_identity_norm;
            d["c1"] = r.c1;
            d["c0"] = r.c0;
            d["legendre_hadamard_min"] = r.legendre_hadamard_min;
            d["major_symmetry_violation"] = r.major_symmetry_violation;
            d["samples"] = r.samples;
            return d;
        },
        py::arg("mu") = 1.0, py::arg("samples") = 1000, py::arg("radius") = 0.5, py::arg("seed") = 1);

    m.def(
        "eigen_study",
        [](int n, const std::vector<double>& mus) {
            py::list rows;
            for (const auto& r : eigen_study(n, mus)) {
                py::dict d;
                d["mu"] = r.mu;
                d["omega_max"] = r.omega_max;
                d["rayleigh_quotient"] = r.rayleigh_quotient;
                d["iterations"] = r.iterations;
                rows.append(d);
            }
            return rows;
        },
        py::arg("n"), py::arg("mus"));

    m.def(
        "growth_ode_study",
        [](double c_bar, double g0, double final_time, const std::vector<double>& dts) {
            const GrowthOdeStudy s = growth_ode_study(baseline_config().model_params().cells, c_bar, g0,
                                                      final_time, dts);
            py::dict d;
            d["dts"] = s.dts;
            d["values"] = s.values;
            d["errors"] = s.errors;
            d["richardson"] = s.richardson;
            d["richardson_error"] = s.richardson_error;
            d["exact"] = s.exact;
            return d;
        },
        py::arg("c_bar"), py::arg("g0"), py::arg("final_time"), py::arg("dts"),
        "Growth ODE at constant concentration with the baseline coefficients.");

    m.def(
        "piola_convergence",
        [](const std::vector<int>& ns) {
            py::list rows;
            for (const auto& r : piola_convergence(ns).rows) {
                rows.append(py::make_tuple(r.n, r.error, r.eoc));
            }
            return rows;
        },
        py::arg("ns"), "Rows (n, residual, eoc) of the Piola identity study.");
}
