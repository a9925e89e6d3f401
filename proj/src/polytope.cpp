#include "polyhybrid/polytope.hpp"

#include "polyhybrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace polyhybrid
{

namespace
{
constexpr double coincidence_tol = 1e-12;
constexpr double area_tol = 1e-14;
} // namespace

RotationSystem::RotationSystem(std::vector<std::vector<int>> adjacency) : adj_(std::move(adjacency))
{
    const int n = static_cast<int>(adj_.size());
    for (const auto& row : adj_)
        for (int v : row)
            if (v < 0 || v >= n)
                fail(ErrorCode::AsymmetricAdjacency, "neighbour index " + std::to_string(v) + " out of range");
}

RotationSystem RotationSystem::from_one_based(const std::vector<std::vector<int>>& adjacency)
{
    auto adj = adjacency;
    for (auto& row : adj)
        for (int& v : row)
            --v;
    return RotationSystem(std::move(adj));
}

int RotationSystem::next(int a, int b) const
{
    const auto& row = adj_[a];
    auto it = std::find(row.begin(), row.end(), b);
    if (it == row.end())
        fail(ErrorCode::AsymmetricAdjacency, "vertex " + std::to_string(b) + " is not adjacent to " + std::to_string(a));
    ++it;
    return it == row.end() ? row.front() : *it;
}

void RotationSystem::validate(int min_degree) const
{
    for (std::size_t a = 0; a < adj_.size(); ++a)
    {
        const auto& row = adj_[a];
        if (static_cast<int>(row.size()) < min_degree)
            fail(ErrorCode::BadDegree, "vertex " + std::to_string(a) + " has degree " + std::to_string(row.size()));
        for (int b : row)
        {
            if (b == static_cast<int>(a))
                fail(ErrorCode::AsymmetricAdjacency, "self loop at vertex " + std::to_string(a));
            if (std::count(row.begin(), row.end(), b) != 1)
                fail(ErrorCode::AsymmetricAdjacency, "repeated neighbour in list of vertex " + std::to_string(a));
            const auto& back = adj_[b];
            if (std::count(back.begin(), back.end(), static_cast<int>(a)) != 1)
                fail(ErrorCode::AsymmetricAdjacency,
                     "edge " + std::to_string(a) + "-" + std::to_string(b) + " is not reciprocated");
        }
    }
}

double signed_area(const std::vector<Point2>& points)
{
    double a = 0.0;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto& p = points[i];
        const auto& q = points[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Polygon Polygon::from_vertices(std::vector<Point2> points)
{
    const std::size_t n = points.size();
    if (n < 3)
        fail(ErrorCode::DegeneratePolygon, "a polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i)
        if ((points[i] - points[(i + 1) % n]).norm() <= coincidence_tol)
            fail(ErrorCode::DegeneratePolygon, "consecutive vertices " + std::to_string(i) + " coincide");

    double a = signed_area(points);
    if (std::abs(a) < area_tol)
        fail(ErrorCode::DegeneratePolygon, "polygon has zero area");
    if (a < 0.0)
    {
        std::reverse(points.begin() + 1, points.end());
        a = -a;
    }

    Polygon poly;
    poly.vertices_ = std::move(points);
    poly.area_ = a;

    Point2 c = Point2::Zero();
    const auto& v = poly.vertices_;
    for (std::size_t i = 0; i < n; ++i)
    {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % n];
        const double cross = p.x() * q.y() - q.x() * p.y();
        c += cross * (p + q);
    }
    poly.centroid_ = c / (6.0 * a);

    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d = std::max(d, (v[i] - v[j]).norm());
    poly.diameter_ = d;
    return poly;
}

Point2 Polygon::edge_normal(std::size_t i) const
{
    const Point2 t = vertices_[(i + 1) % vertices_.size()] - vertices_[i];
    return Point2(t.y(), -t.x()) / t.norm();
}

double Polygon::edge_length(std::size_t i) const
{
    return (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
}

std::vector<Point2> Polygon::facet_normals() const
{
    std::vector<Point2> normals(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        normals[i] = edge_normal(i);
    return normals;
}

Polyhedron Polyhedron::from_graph(std::vector<Point3> coords, RotationSystem graph)
{
    if (coords.size() != graph.num_vertices())
        fail(ErrorCode::InvalidArgument, "coordinate count does not match the adjacency list");
    graph.validate(3);
    Polyhedron p;
    p.coords_ = std::move(coords);
    p.graph_ = std::move(graph);
    p.build_topology();
    return p;
}

Polyhedron Polyhedron::from_faces(std::vector<Point3> coords, const std::vector<std::vector<int>>& faces)
{
    const int nv = static_cast<int>(coords.size());
    std::map<std::pair<int, int>, int> directed;
    std::map<std::pair<int, int>, int> undirected;
    // successor[b][a] = c for every corner a -> b -> c
    std::vector<std::map<int, int>> successor(nv);

    for (const auto& face : faces)
    {
        const std::size_t m = face.size();
        if (m < 3)
            fail(ErrorCode::NonManifoldEdge, "a face needs at least 3 vertices");
        for (std::size_t i = 0; i < m; ++i)
        {
            const int a = face[i];
            const int b = face[(i + 1) % m];
            const int c = face[(i + 2) % m];
            if (a < 0 || a >= nv)
                fail(ErrorCode::InvalidArgument, "face vertex out of range");
            if (++undirected[{std::min(a, b), std::max(a, b)}] > 2)
                fail(ErrorCode::NonManifoldEdge,
                     "edge " + std::to_string(a) + "-" + std::to_string(b) + " is shared by more than two faces");
            if (++directed[{a, b}] > 1)
                fail(ErrorCode::InconsistentOrientation,
                     "directed edge " + std::to_string(a) + "->" + std::to_string(b) + " appears twice");
            successor[b][a] = c;
        }
    }
    for (const auto& [edge, count] : undirected)
        if (count != 2)
            fail(ErrorCode::NonManifoldEdge,
                 "edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second) + " lies on a single face");

    std::vector<std::vector<int>> adj(nv);
    for (int b = 0; b < nv; ++b)
    {
        const auto& succ = successor[b];
        if (succ.empty())
            fail(ErrorCode::BadDegree, "vertex " + std::to_string(b) + " belongs to no face");
        int start = succ.begin()->first;
        int cur = start;
        do
        {
            adj[b].push_back(cur);
            auto it = succ.find(cur);
            if (it == succ.end())
                fail(ErrorCode::NonManifoldEdge, "open fan around vertex " + std::to_string(b));
            cur = it->second;
        } while (cur != start && adj[b].size() <= succ.size());
        if (adj[b].size() != succ.size())
            fail(ErrorCode::NonManifoldEdge, "vertex " + std::to_string(b) + " has a non-disc neighbourhood");
    }
    return from_graph(std::move(coords), RotationSystem(std::move(adj)));
}

void Polyhedron::build_topology()
{
    const int nv = static_cast<int>(graph_.num_vertices());
    std::map<std::pair<int, int>, int> edge_id;
    for (int a = 0; a < nv; ++a)
        for (int b : graph_.neighbours(a))
            if (a < b)
            {
                edge_id[{a, b}] = static_cast<int>(edges_.size());
                edges_.push_back({a, b});
            }

    std::map<std::pair<int, int>, bool> visited;
    std::vector<std::vector<int>> face_edges;
    for (int a = 0; a < nv; ++a)
        for (int b : graph_.neighbours(a))
        {
            if (visited[{a, b}])
                continue;
            std::vector<int> cycle;
            std::vector<int> fe;
            int u = a;
            int v = b;
            while (!visited[{u, v}])
            {
                visited[{u, v}] = true;
                cycle.push_back(u);
                fe.push_back(edge_id.at({std::min(u, v), std::max(u, v)}));
                const int w = graph_.next(v, u);
                u = v;
                v = w;
            }
            cycles_.push_back(std::move(cycle));
            std::sort(fe.begin(), fe.end());
            face_edges.push_back(std::move(fe));
        }

    const std::size_t counts[4] = {static_cast<std::size_t>(nv), edges_.size(), cycles_.size(), 1};
    std::vector<std::vector<int>> ev;
    for (const auto& e : edges_)
        ev.push_back({e[0], e[1]});
    std::vector<std::vector<int>> fv;
    for (const auto& c : cycles_)
    {
        auto s = c;
        std::sort(s.begin(), s.end());
        fv.push_back(std::move(s));
    }
    for (int d = 0; d < 4; ++d)
    {
        std::vector<std::vector<int>> identity(counts[d]);
        for (std::size_t i = 0; i < counts[d]; ++i)
            identity[i] = {static_cast<int>(i)};
        tables_[d][d] = Table(identity);
    }
    tables_[1][0] = Table(ev);
    tables_[2][0] = Table(fv);
    tables_[2][1] = Table(face_edges);
    for (int s = 0; s < 3; ++s)
    {
        std::vector<int> all(counts[s]);
        std::iota(all.begin(), all.end(), 0);
        tables_[3][s] = Table(std::vector<std::vector<int>>{all});
    }
    for (int d = 0; d < 4; ++d)
        for (int s = d + 1; s < 4; ++s)
            tables_[d][s] = tables_[s][d].transpose(counts[d]);
}

std::size_t Polyhedron::num_faces(int d) const
{
    if (d < 0 || d > 3)
        fail(ErrorCode::InvalidArgument, "face dimension must lie in [0,3]");
    return tables_[d][d].size();
}

const Table& Polyhedron::faces(int d, int s) const
{
    if (d < 0 || d > 3 || s < 0 || s > 3)
        fail(ErrorCode::InvalidArgument, "face dimensions must lie in [0,3]");
    return tables_[d][s];
}

int Polyhedron::euler_characteristic() const
{
    return static_cast<int>(num_faces(0)) - static_cast<int>(num_faces(1)) + static_cast<int>(num_faces(2));
}

} // namespace polyhybrid
