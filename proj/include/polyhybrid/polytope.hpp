#pragma once

#include "polyhybrid/table.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace polyhybrid
{

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

/// Cyclically ordered vertex adjacency of an embedded graph (0-based indices).
class RotationSystem
{
public:
    RotationSystem() = default;
    explicit RotationSystem(std::vector<std::vector<int>> adjacency);

    /// Builds from lists that use 1-based vertex numbers.
    static RotationSystem from_one_based(const std::vector<std::vector<int>>& adjacency);

    std::size_t num_vertices() const { return adj_.size(); }
    const std::vector<int>& neighbours(int v) const { return adj_[v]; }
    const std::vector<std::vector<int>>& adjacency() const { return adj_; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }

    /// The vertex following b in the cyclic neighbour list of a.
    int next(int a, int b) const;

    /// Throws AsymmetricAdjacency or BadDegree when the graph is not a valid rotation system.
    void validate(int min_degree) const;

    bool operator==(const RotationSystem&) const = default;

private:
    std::vector<std::vector<int>> adj_;
};

/// Counter-clockwise simple polygon with at least three vertices.
class Polygon
{
public:
    Polygon() = default;

    /// Reverses clockwise input while keeping the first vertex in place.
    static Polygon from_vertices(std::vector<Point2> points);

    std::size_t num_vertices() const { return vertices_.size(); }
    const std::vector<Point2>& vertices() const { return vertices_; }
    const Point2& vertex(std::size_t i) const { return vertices_[i]; }

    double area() const { return area_; }
    const Point2& centroid() const { return centroid_; }
    double diameter() const { return diameter_; }

    /// Outward unit normal of edge i (from vertex i to vertex i+1).
    Point2 edge_normal(std::size_t i) const;
    double edge_length(std::size_t i) const;
    std::vector<Point2> facet_normals() const;

private:
    std::vector<Point2> vertices_;
    double area_ = 0.0;
    Point2 centroid_ = Point2::Zero();
    double diameter_ = 0.0;
};

double signed_area(const std::vector<Point2>& points);

/// Closed polyhedral surface given by coordinates and a rotation system.
class Polyhedron
{
public:
    Polyhedron() = default;

    static Polyhedron from_graph(std::vector<Point3> coords, RotationSystem graph);

    /// Infers the rotation system from consistently oriented face cycles.
    static Polyhedron from_faces(std::vector<Point3> coords, const std::vector<std::vector<int>>& faces);

    const std::vector<Point3>& coordinates() const { return coords_; }
    const RotationSystem& graph() const { return graph_; }

    std::size_t num_faces(int d) const;

    /// Incidence table: for every d-face, the sorted ids of incident s-faces.
    const Table& faces(int d, int s) const;

    /// Oriented vertex cycles of the 2-faces, in tracing order.
    const std::vector<std::vector<int>>& face_cycles() const { return cycles_; }

    const std::vector<std::array<int, 2>>& edges() const { return edges_; }

    int euler_characteristic() const;

private:
    void build_topology();

    std::vector<Point3> coords_;
    RotationSystem graph_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::vector<int>> cycles_;
    std::array<std::array<Table, 4>, 4> tables_;
};

} // namespace polyhybrid
