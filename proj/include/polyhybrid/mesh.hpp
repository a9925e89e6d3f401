#pragma once

#include "polyhybrid/polytope.hpp"
#include "polyhybrid/table.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace polyhybrid
{

/// Integer tag per face of each dimension, plus names for tags.
class FaceLabeling
{
public:
    static constexpr int interior = 0;
    static constexpr int boundary = 1;

    FaceLabeling() = default;
    FaceLabeling(std::array<std::vector<int>, 3> tags, std::map<std::string, int> names);

    int tag(int d, int face) const { return tags_[d][face]; }
    const std::vector<int>& tags(int d) const { return tags_[d]; }

    /// Tag id registered under the given name; throws InvalidArgument when unknown.
    int tag_of(const std::string& name) const;
    const std::map<std::string, int>& names() const { return names_; }

    std::vector<int> faces_with_tag(int d, int tag) const;

private:
    std::array<std::vector<int>, 3> tags_;
    std::map<std::string, int> names_;
};

struct FacetData
{
    Point2 midpoint;
    double length = 0.0;
    Point2 normal;
    std::vector<int> cells;
    std::vector<int> signs;
};

/// Two-dimensional mesh made of arbitrary polygons.
///
/// Every facet stores a fixed unit normal that points out of its lowest-index
/// cell; each (cell, facet) pair records whether that normal is outward (+1)
/// or inward (-1) for the cell.
class PolytopalMesh
{
public:
    PolytopalMesh() = default;

    /// Cells are vertex-index loops; clockwise loops are reoriented.
    static PolytopalMesh from_polygons(std::vector<Point2> vertices, std::vector<std::vector<int>> cells);

    std::size_t num_faces(int d) const;
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_facets() const { return facet_vertices_.size(); }
    std::size_t num_cells() const { return cells_.size(); }

    const std::vector<Point2>& vertices() const { return vertices_; }
    const Point2& vertex(int v) const { return vertices_[v]; }
    const Polygon& cell(int c) const { return cells_[c]; }
    const std::array<int, 2>& facet_vertices(int f) const { return facet_vertices_[f]; }

    /// Incidence: sub-faces for s<d (in cyclic order for cells), itself for s=d, sorted co-faces for s>d.
    const Table& get_faces(int d, int s) const;

    FacetData facet_data(int f) const;
    const Point2& facet_normal(int f) const { return facet_normals_[f]; }
    double facet_length(int f) const { return facet_lengths_[f]; }
    Point2 facet_midpoint(int f) const;
    bool is_boundary_facet(int f) const { return get_faces(1, 2).row_size(f) == 1; }

    /// Orientation sign of the i-th facet of cell c.
    int facet_sign(int c, int local) const { return signs_[get_faces(2, 1).offsets()[c] + local]; }
    /// Outward unit normal of the i-th facet of cell c.
    Point2 outward_normal(int c, int local) const;

    const FaceLabeling& labels() const { return labels_; }

    double h_max() const;
    double total_area() const;

private:
    std::vector<Point2> vertices_;
    std::vector<Polygon> cells_;
    std::vector<std::array<int, 2>> facet_vertices_;
    std::vector<Point2> facet_normals_;
    std::vector<double> facet_lengths_;
    std::vector<int> signs_;
    std::array<std::array<Table, 3>, 3> tables_;
    FaceLabeling labels_;
};

/// n x n quadrilateral mesh of the unit square.
PolytopalMesh cartesian_mesh(int n);

/// Voronoi diagram of the (n+1)^2 vertices of an n x n grid, clipped to the unit square.
PolytopalMesh voronoi_mesh(int n);

/// Voronoi diagram of arbitrary distinct sites in the unit square, clipped to it.
PolytopalMesh voronoi_mesh(const std::vector<Point2>& sites);

/// Grid vertices moved by a deterministic pseudo-random offset of relative size `amplitude`.
/// Boundary sites stay on their edge so the diagram keeps a cell at every corner.
std::vector<Point2> perturbed_grid_sites(int n, double amplitude, unsigned seed);

} // namespace polyhybrid
