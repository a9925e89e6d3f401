#include "polyhybrid/io.hpp"

#include "polyhybrid/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace polyhybrid
{

namespace
{

std::ofstream open_for_writing(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out)
        fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_polygons(std::ostream& out, const PolytopalMesh& mesh, std::size_t npoints,
                    const std::function<void(std::ostream&, std::size_t)>& points,
                    const std::function<std::vector<std::size_t>(int)>& loop)
{
    out << "# vtk DataFile Version 3.0\npolyhybrid\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << npoints << " double\n";
    for (std::size_t i = 0; i < npoints; ++i)
        points(out, i);
    std::size_t size = 0;
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c)
        size += 1 + loop(c).size();
    out << "POLYGONS " << mesh.num_cells() << ' ' << size << '\n';
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c)
    {
        const auto ids = loop(c);
        out << ids.size();
        for (auto i : ids)
            out << ' ' << i;
        out << '\n';
    }
}

} // namespace

void write_vtk_mesh(const PolytopalMesh& mesh, const std::string& path)
{
    auto out = open_for_writing(path);
    const auto& cv = mesh.get_faces(2, 0);
    write_polygons(
        out, mesh, mesh.num_vertices(),
        [&](std::ostream& o, std::size_t i) {
            const auto& p = mesh.vertex(static_cast<int>(i));
            o << g17(p.x()) << ' ' << g17(p.y()) << " 0\n";
        },
        [&](int c) {
            std::vector<std::size_t> ids;
            for (int v : cv[c])
                ids.push_back(static_cast<std::size_t>(v));
            return ids;
        });
    out << "CELL_DATA " << mesh.num_cells() << "\nSCALARS cell_id int 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < mesh.num_cells(); ++c)
        out << c << '\n';
    finish(out, path);
}

void write_vtk_solution(const PolytopalMesh& mesh, const std::map<std::string, FEFunction>& fields,
                        const std::string& path)
{
    auto out = open_for_writing(path);
    const auto& cv = mesh.get_faces(2, 0);
    std::vector<Point2> pts;
    std::vector<std::size_t> first(mesh.num_cells() + 1, 0);
    for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c)
    {
        for (int v : cv[c])
            pts.push_back(mesh.vertex(v));
        first[c + 1] = pts.size();
    }
    write_polygons(
        out, mesh, pts.size(),
        [&](std::ostream& o, std::size_t i) { o << g17(pts[i].x()) << ' ' << g17(pts[i].y()) << " 0\n"; },
        [&](int c) {
            std::vector<std::size_t> ids;
            for (std::size_t i = first[c]; i < first[c + 1]; ++i)
                ids.push_back(i);
            return ids;
        });
    out << "POINT_DATA " << pts.size() << '\n';
    for (const auto& [name, fn] : fields)
    {
        if (fn.space().slice_dim() != 2 || &fn.space().mesh() != &mesh)
            continue;
        const int nc = fn.space().components();
        std::vector<Eigen::MatrixXd> vals(mesh.num_cells());
        for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c)
            vals[c] = fn.evaluate(2, c, std::vector<Point2>(pts.begin() + first[c], pts.begin() + first[c + 1]));
        if (nc == 1)
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        else if (nc == 2)
            out << "VECTORS " << name << " double\n";
        else
            out << "SCALARS " << name << " double " << nc << "\nLOOKUP_TABLE default\n";
        for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c)
            for (Eigen::Index i = 0; i < vals[c].cols(); ++i)
            {
                for (int k = 0; k < nc; ++k)
                    out << (k ? " " : "") << g17(vals[c](k, i));
                if (nc == 2)
                    out << " 0";
                out << '\n';
            }
    }
    finish(out, path);
}

std::string mesh_summary_json(const PolytopalMesh& mesh)
{
    nlohmann::ordered_json j;
    j["cells"] = mesh.num_cells();
    j["facets"] = mesh.num_facets();
    j["vertices"] = mesh.num_vertices();
    j["h_max"] = mesh.h_max();
    j["total_area"] = mesh.total_area();
    return j.dump(2);
}

void write_mesh_summary(const PolytopalMesh& mesh, const std::string& path)
{
    write_text(mesh_summary_json(mesh) + "\n", path);
}

std::string format_float(double value)
{
    if (std::isnan(value))
        return "-";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", value);
    return buf;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream s;
    s << "method,k,n,h,dofs_full,dofs_condensed,err_l2,err_h1,eoc_l2,eoc_h1\n";
    for (const auto& r : rows)
        s << r.method << ',' << r.k << ',' << r.n << ',' << format_float(r.h) << ',' << r.dofs_full << ','
          << r.dofs_condensed << ',' << format_float(r.err_l2) << ',' << format_float(r.err_h1) << ','
          << format_float(r.eoc_l2) << ',' << format_float(r.eoc_h1) << '\n';
    return s.str();
}

void write_text(const std::string& text, const std::string& path)
{
    auto out = open_for_writing(path);
    out << text;
    finish(out, path);
}

void write_matrix_market(const SparseMatrix& matrix, const std::string& path)
{
    auto out = open_for_writing(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
    for (Eigen::Index r = 0; r < matrix.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(matrix, r); it; ++it)
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << g17(it.value()) << '\n';
    finish(out, path);
}

} // namespace polyhybrid
