#include "polyhybrid/drivers.hpp"
#include "polyhybrid/error.hpp"
#include "polyhybrid/io.hpp"
#include "polyhybrid/mesh.hpp"
#include "polyhybrid/polytope.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace ph = polyhybrid;

namespace
{

/// Immutable mesh handle shared with the solvers.
struct Mesh
{
    std::shared_ptr<const ph::PolytopalMesh> ptr;
};

Mesh wrap(ph::PolytopalMesh m)
{
    return {std::make_shared<const ph::PolytopalMesh>(std::move(m))};
}

ph::RunParameters parameters(const std::string& case_name, const py::kwargs& kw)
{
    ph::RunParameters p;
    p.case_name = case_name;
    for (const auto& [key, value] : kw)
    {
        const auto k = key.cast<std::string>();
        if (k == "gamma")
            p.gamma = value.cast<double>();
        else if (k == "tau")
            p.tau = value.cast<double>();
        else if (k == "lam")
            p.lambda = value.cast<double>();
        else if (k == "mu")
            p.mu = value.cast<double>();
        else if (k == "alpha")
            p.alpha = value.cast<double>();
        else if (k == "za")
            p.za = value.cast<double>();
        else if (k == "zb")
            p.zb = value.cast<double>();
        else if (k == "solver")
            p.driver.solver.kind = ph::parse_solver(value.cast<std::string>());
        else if (k == "tol")
            p.driver.solver.tol = value.cast<double>();
        else if (k == "threads")
            p.driver.threads = value.cast<int>();
        else
            throw py::type_error("unexpected keyword argument '" + k + "'");
    }
    return p;
}

py::dict report_dict(const ph::SolveReport& r)
{
    py::dict d;
    d["method"] = r.method;
    d["k"] = r.k;
    d["n"] = r.n;
    d["h"] = r.h;
    d["dofs_full"] = r.dofs_full;
    d["dofs_condensed"] = r.dofs_condensed;
    d["err_l2"] = r.err_l2;
    d["err_h1"] = r.err_h1;
    d["extra"] = r.extra;
    d["notes"] = r.notes;
    d["iterations"] = r.stats.iterations;
    d["residual"] = r.stats.residual;
    d["time_setup"] = r.time_setup;
    d["time_solve"] = r.time_solve;
    return d;
}

py::dict row_dict(const ph::ConvergenceRow& r)
{
    py::dict d;
    d["method"] = r.method;
    d["k"] = r.k;
    d["n"] = r.n;
    d["h"] = r.h;
    d["dofs_full"] = r.dofs_full;
    d["dofs_condensed"] = r.dofs_condensed;
    d["err_l2"] = r.err_l2;
    d["err_h1"] = r.err_h1;
    d["eoc_l2"] = r.eoc_l2;
    d["eoc_h1"] = r.eoc_h1;
    d["extra"] = r.extra;
    d["eoc_extra"] = r.eoc_extra;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Hybrid polytopal finite element solvers on polygonal meshes";

    py::register_exception<ph::Error>(m, "PolyhybridError", PyExc_RuntimeError);

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("num_cells", [](const Mesh& s) { return s.ptr->num_cells(); })
        .def_property_readonly("num_facets", [](const Mesh& s) { return s.ptr->num_facets(); })
        .def_property_readonly("num_vertices", [](const Mesh& s) { return s.ptr->num_vertices(); })
        .def_property_readonly("h_max", [](const Mesh& s) { return s.ptr->h_max(); })
        .def_property_readonly("total_area", [](const Mesh& s) { return s.ptr->total_area(); })
        .def("vertices",
             [](const Mesh& s) {
                 std::vector<std::array<double, 2>> out;
                 for (const auto& v : s.ptr->vertices())
                     out.push_back({v.x(), v.y()});
                 return out;
             })
        .def("cell_vertices",
             [](const Mesh& s, int c) {
                 if (c < 0 || c >= int(s.ptr->num_cells()))
                     throw py::index_error("cell index out of range");
                 const auto row = s.ptr->get_faces(2, 0)[c];
                 return std::vector<int>(row.begin(), row.end());
             })
        .def("summary_json", [](const Mesh& s) { return ph::mesh_summary_json(*s.ptr); })
        .def("write_vtk", [](const Mesh& s, const std::string& path) { ph::write_vtk_mesh(*s.ptr, path); });

    m.def("cartesian_mesh", [](int n) { return wrap(ph::cartesian_mesh(n)); }, py::arg("n"));
    m.def(
        "voronoi_mesh",
        [](int n, double perturb, unsigned seed) {
            if (perturb > 0.0)
                return wrap(ph::voronoi_mesh(ph::perturbed_grid_sites(n, perturb, seed)));
            return wrap(ph::voronoi_mesh(n));
        },
        py::arg("n"), py::arg("perturb") = 0.0, py::arg("seed") = 1u);
    m.def(
        "voronoi_mesh_from_sites",
        [](const std::vector<std::array<double, 2>>& sites) {
            std::vector<ph::Point2> pts;
            for (const auto& s : sites)
                pts.emplace_back(s[0], s[1]);
            return wrap(ph::voronoi_mesh(pts));
        },
        py::arg("sites"));

    m.def(
        "polyhedron_counts",
        [](const std::vector<std::vector<int>>& adjacency) {
            std::vector<ph::Point3> coords(adjacency.size(), ph::Point3::Zero());
            const auto p = ph::Polyhedron::from_graph(coords, ph::RotationSystem::from_one_based(adjacency));
            py::dict d;
            d["vertices"] = p.num_faces(0);
            d["edges"] = p.num_faces(1);
            d["faces"] = p.num_faces(2);
            d["euler_characteristic"] = p.euler_characteristic();
            return d;
        },
        py::arg("adjacency"), "Face counts of the polyhedron given by a one-based rotation system.");

    m.def("method_names", &ph::method_names);
    m.def("default_case", &ph::default_case, py::arg("method"));

    m.def(
        "solve",
        [](const std::string& method, const Mesh& mesh, int k, const std::string& case_name, const py::kwargs& kw) {
            const auto p = parameters(case_name, kw);
            ph::SolveReport r;
            {
                py::gil_scoped_release release;
                r = ph::run_method(method, mesh.ptr, k, p);
            }
            return report_dict(r);
        },
        py::arg("method"), py::arg("mesh"), py::arg("k"), py::arg("case") = "");

    m.def(
        "convergence_study",
        [](const std::string& method, int k, const std::vector<int>& ns, const std::string& case_name,
           const py::kwargs& kw) {
            const auto p = parameters(case_name, kw);
            std::vector<ph::ConvergenceRow> rows;
            {
                py::gil_scoped_release release;
                rows = ph::convergence_study(method, k, ns, p);
            }
            py::list out;
            for (const auto& r : rows)
                out.append(row_dict(r));
            return out;
        },
        py::arg("method"), py::arg("k"), py::arg("ns"), py::arg("case") = "");
}
