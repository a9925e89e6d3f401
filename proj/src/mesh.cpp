#include "polyhybrid/mesh.hpp"

#include "polyhybrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

namespace polyhybrid
{

FaceLabeling::FaceLabeling(std::array<std::vector<int>, 3> tags, std::map<std::string, int> names)
  : tags_(std::move(tags)), names_(std::move(names))
{
}

int FaceLabeling::tag_of(const std::string& name) const
{
    auto it = names_.find(name);
    if (it == names_.end())
        fail(ErrorCode::InvalidArgument, "unknown tag name '" + name + "'");
    return it->second;
}

std::vector<int> FaceLabeling::faces_with_tag(int d, int tag) const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < tags_[d].size(); ++i)
        if (tags_[d][i] == tag)
            out.push_back(static_cast<int>(i));
    return out;
}

PolytopalMesh PolytopalMesh::from_polygons(std::vector<Point2> vertices, std::vector<std::vector<int>> cells)
{
    PolytopalMesh m;
    m.vertices_ = std::move(vertices);
    const int nv = static_cast<int>(m.vertices_.size());

    std::vector<std::vector<int>> cell_vertices;
    cell_vertices.reserve(cells.size());
    for (auto& loop : cells)
    {
        std::vector<Point2> pts;
        for (int v : loop)
        {
            if (v < 0 || v >= nv)
                fail(ErrorCode::InvalidMesh, "cell vertex index out of range");
            pts.push_back(m.vertices_[v]);
        }
        if (signed_area(pts) < 0.0)
            std::reverse(loop.begin() + 1, loop.end());
        pts.clear();
        for (int v : loop)
            pts.push_back(m.vertices_[v]);
        m.cells_.push_back(Polygon::from_vertices(pts));
        cell_vertices.push_back(loop);
    }

    std::map<std::pair<int, int>, int> facet_of;
    std::vector<std::vector<int>> cell_facets(cells.size());
    std::vector<int> uses;
    for (std::size_t c = 0; c < cell_vertices.size(); ++c)
    {
        const auto& loop = cell_vertices[c];
        for (std::size_t i = 0; i < loop.size(); ++i)
        {
            const int a = loop[i];
            const int b = loop[(i + 1) % loop.size()];
            auto key = std::make_pair(std::min(a, b), std::max(a, b));
            auto it = facet_of.find(key);
            if (it == facet_of.end())
            {
                const int f = static_cast<int>(m.facet_vertices_.size());
                facet_of.emplace(key, f);
                m.facet_vertices_.push_back({a, b});
                uses.push_back(1);
                cell_facets[c].push_back(f);
                m.signs_.push_back(1);
            }
            else
            {
                const int f = it->second;
                if (++uses[f] > 2)
                    fail(ErrorCode::InvalidMesh, "facet shared by more than two cells");
                if (m.facet_vertices_[f][0] != b)
                    fail(ErrorCode::InvalidMesh, "neighbouring cells traverse a facet in the same direction");
                cell_facets[c].push_back(f);
                m.signs_.push_back(-1);
            }
        }
    }

    const std::size_t nf = m.facet_vertices_.size();
    m.facet_normals_.resize(nf);
    m.facet_lengths_.resize(nf);
    for (std::size_t f = 0; f < nf; ++f)
    {
        const Point2 t = m.vertices_[m.facet_vertices_[f][1]] - m.vertices_[m.facet_vertices_[f][0]];
        m.facet_lengths_[f] = t.norm();
        if (m.facet_lengths_[f] <= 1e-12)
            fail(ErrorCode::InvalidMesh, "zero-length facet");
        m.facet_normals_[f] = Point2(t.y(), -t.x()) / m.facet_lengths_[f];
    }

    std::vector<std::vector<int>> fv(nf);
    for (std::size_t f = 0; f < nf; ++f)
        fv[f] = {m.facet_vertices_[f][0], m.facet_vertices_[f][1]};
    const std::size_t counts[3] = {static_cast<std::size_t>(nv), nf, m.cells_.size()};
    for (int d = 0; d < 3; ++d)
    {
        std::vector<int> offsets(counts[d] + 1);
        std::iota(offsets.begin(), offsets.end(), 0);
        std::vector<int> data(counts[d]);
        std::iota(data.begin(), data.end(), 0);
        m.tables_[d][d] = Table(std::move(offsets), std::move(data));
    }
    m.tables_[1][0] = Table(fv);
    m.tables_[2][0] = Table(cell_vertices);
    m.tables_[2][1] = Table(cell_facets);
    m.tables_[0][1] = m.tables_[1][0].transpose(counts[0]);
    m.tables_[0][2] = m.tables_[2][0].transpose(counts[0]);
    m.tables_[1][2] = m.tables_[2][1].transpose(counts[1]);

    std::array<std::vector<int>, 3> tags;
    tags[0].assign(counts[0], FaceLabeling::interior);
    tags[1].assign(counts[1], FaceLabeling::interior);
    tags[2].assign(counts[2], FaceLabeling::interior);
    for (std::size_t f = 0; f < nf; ++f)
        if (uses[f] == 1)
        {
            tags[1][f] = FaceLabeling::boundary;
            tags[0][m.facet_vertices_[f][0]] = FaceLabeling::boundary;
            tags[0][m.facet_vertices_[f][1]] = FaceLabeling::boundary;
        }
    m.labels_ = FaceLabeling(std::move(tags), {{"interior", FaceLabeling::interior}, {"boundary", FaceLabeling::boundary}});
    return m;
}

std::size_t PolytopalMesh::num_faces(int d) const
{
    if (d < 0 || d > 2)
        fail(ErrorCode::InvalidArgument, "face dimension must lie in [0,2]");
    return tables_[d][d].size();
}

const Table& PolytopalMesh::get_faces(int d, int s) const
{
    if (d < 0 || d > 2 || s < 0 || s > 2)
        fail(ErrorCode::InvalidArgument, "face dimensions must lie in [0,2]");
    return tables_[d][s];
}

Point2 PolytopalMesh::facet_midpoint(int f) const
{
    return 0.5 * (vertices_[facet_vertices_[f][0]] + vertices_[facet_vertices_[f][1]]);
}

FacetData PolytopalMesh::facet_data(int f) const
{
    FacetData data;
    data.midpoint = facet_midpoint(f);
    data.length = facet_lengths_[f];
    data.normal = facet_normals_[f];
    for (int c : get_faces(1, 2)[f])
    {
        data.cells.push_back(c);
        auto facets = get_faces(2, 1)[c];
        const auto local = std::find(facets.begin(), facets.end(), f) - facets.begin();
        data.signs.push_back(facet_sign(c, static_cast<int>(local)));
    }
    return data;
}

Point2 PolytopalMesh::outward_normal(int c, int local) const
{
    const int f = get_faces(2, 1)[c][local];
    return static_cast<double>(facet_sign(c, local)) * facet_normals_[f];
}

double PolytopalMesh::h_max() const
{
    double h = 0.0;
    for (const auto& c : cells_)
        h = std::max(h, c.diameter());
    return h;
}

double PolytopalMesh::total_area() const
{
    double a = 0.0;
    for (const auto& c : cells_)
        a += c.area();
    return a;
}

PolytopalMesh cartesian_mesh(int n)
{
    if (n < 1)
        fail(ErrorCode::InvalidArgument, "cartesian mesh needs n >= 1");
    std::vector<Point2> vertices;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    return PolytopalMesh::from_polygons(std::move(vertices), std::move(cells));
}

namespace
{

constexpr double merge_tol = 1e-10;

// Keeps the part of the polygon where (x - mid) . dir <= 0.
std::vector<Point2> clip(const std::vector<Point2>& poly, const Point2& mid, const Point2& dir)
{
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    const double scale = dir.norm();
    auto side = [&](const Point2& p) { return (p - mid).dot(dir) / scale; };
    for (std::size_t i = 0; i < n; ++i)
    {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        const double sp = side(p);
        const double sq = side(q);
        const bool pin = sp <= 1e-14;
        const bool qin = sq <= 1e-14;
        if (pin)
            out.push_back(p);
        if (pin != qin && std::abs(sp) > 1e-14 && std::abs(sq) > 1e-14)
        {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

struct VertexMerger
{
    std::vector<Point2> points;
    std::unordered_map<long long, std::vector<int>> buckets;

    static long long key(long long i, long long j) { return i * 4000037LL + j; }

    int insert(const Point2& p)
    {
        const double cell = 1e-8;
        const long long i = static_cast<long long>(std::floor(p.x() / cell));
        const long long j = static_cast<long long>(std::floor(p.y() / cell));
        for (long long di = -1; di <= 1; ++di)
            for (long long dj = -1; dj <= 1; ++dj)
            {
                auto it = buckets.find(key(i + di, j + dj));
                if (it == buckets.end())
                    continue;
                for (int v : it->second)
                    if ((points[v] - p).norm() <= merge_tol)
                        return v;
            }
        const int v = static_cast<int>(points.size());
        points.push_back(p);
        buckets[key(i, j)].push_back(v);
        return v;
    }
};

bool on_unit_square_boundary(const Point2& p)
{
    return std::abs(p.x()) <= merge_tol || std::abs(p.x() - 1.0) <= merge_tol || std::abs(p.y()) <= merge_tol
        || std::abs(p.y() - 1.0) <= merge_tol;
}

} // namespace

PolytopalMesh voronoi_mesh(const std::vector<Point2>& sites)
{
    const std::size_t ns = sites.size();
    if (ns < 1)
        fail(ErrorCode::InvalidArgument, "voronoi mesh needs at least one site");
    for (const auto& s : sites)
        if (s.x() < 0.0 || s.x() > 1.0 || s.y() < 0.0 || s.y() > 1.0)
            fail(ErrorCode::InvalidArgument, "voronoi sites must lie in the unit square");

    VertexMerger merger;
    std::vector<std::vector<int>> cells;
    std::vector<std::pair<double, int>> order(ns);
    for (std::size_t i = 0; i < ns; ++i)
    {
        for (std::size_t j = 0; j < ns; ++j)
            order[j] = {(sites[j] - sites[i]).squaredNorm(), static_cast<int>(j)};
        std::sort(order.begin(), order.end());

        std::vector<Point2> poly = {Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)};
        for (const auto& [dist2, j] : order)
        {
            if (j == static_cast<int>(i))
                continue;
            double reach = 0.0;
            for (const auto& p : poly)
                reach = std::max(reach, (p - sites[i]).norm());
            // sites farther than twice the cell radius cannot cut the cell
            if (std::sqrt(dist2) > 2.0 * reach + merge_tol)
                break;
            if (dist2 <= merge_tol * merge_tol)
                fail(ErrorCode::InvalidArgument, "duplicate voronoi sites");
            poly = clip(poly, 0.5 * (sites[i] + sites[j]), sites[j] - sites[i]);
        }

        std::vector<int> loop;
        for (const auto& p : poly)
        {
            const int v = merger.insert(p);
            if (loop.empty() || loop.back() != v)
                loop.push_back(v);
        }
        while (loop.size() > 1 && loop.front() == loop.back())
            loop.pop_back();
        if (loop.size() < 3)
            fail(ErrorCode::InvalidMesh, "voronoi cell collapsed to fewer than 3 vertices");
        cells.push_back(std::move(loop));
    }

    auto mesh = PolytopalMesh::from_polygons(std::move(merger.points), std::move(cells));
    for (std::size_t f = 0; f < mesh.num_facets(); ++f)
    {
        if (!mesh.is_boundary_facet(static_cast<int>(f)))
            continue;
        const auto& fv = mesh.facet_vertices(static_cast<int>(f));
        const Point2& a = mesh.vertex(fv[0]);
        const Point2& b = mesh.vertex(fv[1]);
        const Point2 mid = 0.5 * (a + b);
        if (!on_unit_square_boundary(a) || !on_unit_square_boundary(b) || !on_unit_square_boundary(mid))
            fail(ErrorCode::InvalidMesh, "voronoi diagram has an unmatched interior facet");
    }
    return mesh;
}

PolytopalMesh voronoi_mesh(int n)
{
    if (n < 2)
        fail(ErrorCode::InvalidArgument, "voronoi mesh needs n >= 2");
    std::vector<Point2> sites;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            sites.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    return voronoi_mesh(sites);
}

std::vector<Point2> perturbed_grid_sites(int n, double amplitude, unsigned seed)
{
    if (n < 2)
        fail(ErrorCode::InvalidArgument, "perturbed grid needs n >= 2");
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1.0 / n;
    std::vector<Point2> sites;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
        {
            double x = i * h;
            double y = j * h;
            const double dx = amplitude * h * u(gen);
            const double dy = amplitude * h * u(gen);
            if (i > 0 && i < n)
                x += dx;
            if (j > 0 && j < n)
                y += dy;
            sites.emplace_back(x, y);
        }
    return sites;
}

} // namespace polyhybrid
