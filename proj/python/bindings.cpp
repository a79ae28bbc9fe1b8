#include "flatlab/analysis.hpp"
#include "flatlab/config.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/experiments.hpp"
#include "flatlab/harmonic.hpp"
#include "flatlab/minimal.hpp"
#include "flatlab/serialize.hpp"
#include "flatlab/surfaces.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace flatlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointCloud cloud_from_array(const Array& a)
{
    if (a.ndim() != 2) {
        throw InvalidArgument("points must be a 2-d array of shape (count, n)");
    }
    const auto* p = a.data();
    return PointCloud(static_cast<int>(a.shape(1)), std::vector<double>(p, p + a.size()));
}

py::array_t<double> cloud_to_array(const PointCloud& c)
{
    py::array_t<double> out({static_cast<py::ssize_t>(c.size()), static_cast<py::ssize_t>(c.ambient_dim())});
    std::copy(c.coords().begin(), c.coords().end(), out.mutable_data());
    return out;
}

py::array_t<double> values_array(const SampledGraph& g)
{
    py::array_t<double> out(
        {static_cast<py::ssize_t>(g.grid.radial_count()), static_cast<py::ssize_t>(g.grid.angular_count())});
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_flatlab, m)
{
    m.doc() = "Annular flatness laboratory for minimal graphs";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::enum_<HeightMode>(m, "HeightMode").value("centered", HeightMode::centered).value("shifted", HeightMode::shifted);
    py::enum_<ModeKind>(m, "ModeKind")
        .value("growing", ModeKind::growing)
        .value("decaying", ModeKind::decaying)
        .value("log", ModeKind::log);

    py::class_<GraphGrid>(m, "GraphGrid")
        .def_static("polar", &GraphGrid::polar, py::arg("rho_in"), py::arg("rho_out"), py::arg("radial"),
                    py::arg("angular"))
        .def_static("spherical", &GraphGrid::spherical, py::arg("base_dim"), py::arg("rho_in"), py::arg("rho_out"),
                    py::arg("radial"), py::arg("directions"))
        .def_property_readonly("base_dim", &GraphGrid::base_dim)
        .def_property_readonly("radial_count", &GraphGrid::radial_count)
        .def_property_readonly("angular_count", &GraphGrid::angular_count)
        .def_property_readonly("radii", &GraphGrid::radii)
        .def_property_readonly("log_step", &GraphGrid::log_step);

    py::class_<SampledGraph>(m, "SampledGraph")
        .def_readonly("grid", &SampledGraph::grid)
        .def_property_readonly("values", &values_array)
        .def("to_cloud", [](const SampledGraph& g) { return cloud_to_array(graph_to_cloud(g)); })
        .def("to_csv", [](const SampledGraph& g) { return graph_to_csv(g); })
        .def("to_json", [](const SampledGraph& g) { return graph_to_json(g); })
        .def_static("from_csv", [](const std::string& s) { return graph_from_csv(s); })
        .def_static("from_json", [](const std::string& s) { return graph_from_json(s); });

    py::class_<HarmonicMode>(m, "HarmonicMode")
        .def(py::init([](int mm, int k, ModeKind kind, std::vector<double> axis, double coefficient) {
                 HarmonicMode md{mm, k, kind, std::move(axis), coefficient};
                 validate_mode(md);
                 return md;
             }),
             py::arg("m"), py::arg("k"), py::arg("kind"), py::arg("axis") = std::vector<double>{},
             py::arg("coefficient") = 1.0)
        .def_readonly("m", &HarmonicMode::m)
        .def_readonly("k", &HarmonicMode::k)
        .def_readonly("kind", &HarmonicMode::kind)
        .def_readonly("axis", &HarmonicMode::axis)
        .def_readonly("coefficient", &HarmonicMode::coefficient);

    py::class_<HeightRecord>(m, "HeightRecord")
        .def_readonly("r", &HeightRecord::r)
        .def_readonly("H", &HeightRecord::H)
        .def_property_readonly("e",
                               [](const HeightRecord& h) {
                                   auto c = h.e.components();
                                   return std::vector<double>(c.begin(), c.end());
                               })
        .def_readonly("b", &HeightRecord::b)
        .def_readonly("certificate_radius", &HeightRecord::certificate_radius);

    m.def(
        "flatness",
        [](const Array& points, double r, HeightMode mode) {
            return flatness(cloud_from_array(points), AnnularWindow(r), mode);
        },
        py::arg("points"), py::arg("r"), py::arg("mode") = HeightMode::shifted,
        "Smallest annular height of the points over B_2r minus B_r/2.");

    m.def(
        "annular_height",
        [](const Array& points, double r, std::vector<double> e, double b) {
            return annular_height(cloud_from_array(points), AnnularWindow(r), Direction(std::move(e)), b);
        },
        py::arg("points"), py::arg("r"), py::arg("e"), py::arg("b") = 0.0);

    m.def("make_catenoid3", &make_catenoid3, py::arg("c"), py::arg("grid"));
    m.def(
        "make_catenoid_n",
        [](int n, double c, const GraphGrid& grid, bool waist_anchor) {
            return make_catenoid_n({n, c, 1}, grid, waist_anchor ? CatenoidAnchor::waist : CatenoidAnchor::innermost);
        },
        py::arg("n"), py::arg("c"), py::arg("grid"), py::arg("waist_anchor") = false);
    m.def("catenoid_tail", &catenoid_tail, py::arg("n"), py::arg("c"), py::arg("rho"));
    m.def("make_harmonic_graph", &make_harmonic_graph, py::arg("modes"), py::arg("grid"));
    m.def("kelvin_transform", &kelvin_transform, py::arg("field"));
    m.def("laplace_residual", &laplace_residual, py::arg("field"));

    m.def(
        "solve_dirichlet",
        [](const std::vector<double>& g_in, const std::vector<double>& g_out, const GraphGrid& grid) {
            auto sol = solve_dirichlet(g_in, g_out, grid);
            py::dict report;
            report["iters"] = sol.report.iters;
            report["residuals"] = sol.report.residuals;
            report["tolerance"] = sol.report.tolerance;
            return py::make_tuple(sol.graph, report);
        },
        py::arg("g_in"), py::arg("g_out"), py::arg("grid"));

    py::class_<AsymptoticFit>(m, "AsymptoticFit")
        .def_readonly("b", &AsymptoticFit::b)
        .def_readonly("c", &AsymptoticFit::c)
        .def_readonly("d", &AsymptoticFit::d)
        .def_readonly("residual_exponent", &AsymptoticFit::residual_exponent)
        .def_readonly("residual_sups", &AsymptoticFit::residual_sups);
    m.def("fit_asymptotics", &fit_asymptotics, py::arg("graph"), py::arg("beta") = 0.5, py::arg("rho_start") = 0.0,
          py::arg("annuli") = 0);

    py::class_<HeightProfile>(m, "HeightProfile")
        .def_readonly("records", &HeightProfile::records)
        .def_readonly("eta_certificate", &HeightProfile::eta_certificate)
        .def("to_csv", [](const HeightProfile& p) { return profile_to_csv(p); });
    m.def(
        "height_profile",
        [](const Array& points, const std::vector<double>& scales, HeightMode mode, double R, double eta) {
            return height_profile(cloud_from_array(points), scales, mode, R, eta);
        },
        py::arg("points"), py::arg("scales"), py::arg("mode") = HeightMode::shifted, py::arg("R") = 0.0,
        py::arg("eta") = 0.0);
    m.def("dyadic_scales", &dyadic_scales, py::arg("r0"), py::arg("r1"));
    m.def(
        "decay_constant", [](const HeightProfile& p, double alpha) { return verify_decay_bound(p, alpha).C_min; },
        py::arg("profile"), py::arg("alpha") = 0.5);

    m.def(
        "sheet_decompose",
        [](const Array& points, double eps, double density) {
            const auto dec = sheet_decompose(cloud_from_array(points), eps, density);
            py::list sheets;
            for (const auto& s : dec.sheets) {
                sheets.append(cloud_to_array(s));
            }
            return py::make_tuple(sheets, dec.ordered, dec.connected);
        },
        py::arg("points"), py::arg("eps"), py::arg("density"));

    m.def("experiment_kinds", &experiment_kinds);
    m.def(
        "run_experiment",
        [](const std::string& config_text, const std::vector<std::string>& overrides) {
            auto cfg = parse_config(config_text);
            for (const auto& o : overrides) {
                apply_override(cfg, o);
            }
            const auto res = run_experiment(cfg);
            py::dict files;
            for (const auto& f : res.files) {
                files[py::str(f.name)] = f.content;
            }
            return py::make_tuple(res.pass, res.summary, files);
        },
        py::arg("config_text") = "", py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "validate_config",
        [](const std::string& text) { return validate(parse_config(text)); }, py::arg("config_text"));
}
