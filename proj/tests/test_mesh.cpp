#include "helpers.hpp"

#include "polyhybrid/error.hpp"
#include "polyhybrid/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

using namespace polyhybrid;

namespace
{

void expect_consistent(const PolytopalMesh& m)
{
    // Euler characteristic of a planar disc: V - E + C = 1.
    EXPECT_EQ(int(m.num_vertices()) - int(m.num_facets()) + int(m.num_cells()), 1);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);

    const auto& cf = m.get_faces(2, 1);
    const auto& fc = m.get_faces(1, 2);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
        for (int f : cf[c])
        {
            auto row = fc[f];
            EXPECT_NE(std::find(row.begin(), row.end(), int(c)), row.end());
        }
    for (std::size_t f = 0; f < m.num_facets(); ++f)
        for (int c : fc[f])
        {
            auto row = cf[c];
            EXPECT_NE(std::find(row.begin(), row.end(), int(f)), row.end());
        }

    // Outward normals integrate to zero over each closed cell boundary.
    for (std::size_t c = 0; c < m.num_cells(); ++c)
    {
        Point2 sum = Point2::Zero();
        for (std::size_t l = 0; l < cf.row_size(c); ++l)
            sum += m.outward_normal(int(c), int(l)) * m.facet_length(cf[c][l]);
        EXPECT_LT(sum.norm(), 1e-13);
    }
}

bool is_convex(const Polygon& p)
{
    const std::size_t n = p.num_vertices();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Point2 a = p.vertex(i);
        const Point2 b = p.vertex((i + 1) % n);
        const Point2 c = p.vertex((i + 2) % n);
        const Point2 u = b - a;
        const Point2 v = c - b;
        if (u.x() * v.y() - u.y() * v.x() < -1e-14)
            return false;
    }
    return true;
}

} // namespace

TEST(CartesianMesh, SingleCellIsUnitSquare)
{
    auto m = cartesian_mesh(1);
    ASSERT_EQ(m.num_cells(), 1u);
    EXPECT_DOUBLE_EQ(m.cell(0).area(), 1.0);
    EXPECT_EQ(m.get_faces(2, 1).row_size(0), 4u);
    EXPECT_EQ(m.get_faces(2, 2)[0][0], 0);
}

TEST(CartesianMesh, Counts)
{
    auto m = cartesian_mesh(2);
    EXPECT_EQ(m.num_cells(), 4u);
    EXPECT_EQ(m.num_facets(), 12u);
    EXPECT_EQ(m.num_vertices(), 9u);
    auto m3 = cartesian_mesh(3);
    EXPECT_EQ(m3.num_vertices(), 16u);
    EXPECT_EQ(m3.num_facets(), 24u);
    EXPECT_EQ(m3.num_cells(), 9u);
    expect_consistent(m3);
}

TEST(CartesianMesh, HorizontalFacetData)
{
    auto m = cartesian_mesh(1);
    int bottom = -1;
    for (std::size_t f = 0; f < m.num_facets(); ++f)
    {
        const auto d = m.facet_data(int(f));
        if (std::abs(d.midpoint.y()) < 1e-15)
            bottom = int(f);
    }
    ASSERT_GE(bottom, 0);
    const auto d = m.facet_data(bottom);
    EXPECT_DOUBLE_EQ(d.length, 1.0);
    EXPECT_LT((d.normal - Point2(0, -1)).norm(), 1e-15);
    ASSERT_EQ(d.cells.size(), 1u);
    EXPECT_EQ(d.signs[0], 1);
}

TEST(VoronoiMesh, TwoByTwo)
{
    auto m = voronoi_mesh(2);
    EXPECT_EQ(m.num_cells(), 9u);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
        EXPECT_TRUE(is_convex(m.cell(int(c))));
    expect_consistent(m);
}

TEST(VoronoiMesh, FourByFour)
{
    auto m = voronoi_mesh(4);
    EXPECT_EQ(m.num_cells(), 25u);
    expect_consistent(m);
}

TEST(VoronoiMesh, RejectsTooCoarse)
{
    try
    {
        voronoi_mesh(1);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    }
}

TEST(VoronoiMesh, JitteredSitesGiveGenuinePolygons)
{
    auto m = voronoi_mesh(perturbed_grid_sites(6, 0.3, 11));
    EXPECT_EQ(m.num_cells(), 49u);
    expect_consistent(m);
    std::size_t max_vertices = 0;
    for (std::size_t c = 0; c < m.num_cells(); ++c)
    {
        EXPECT_TRUE(is_convex(m.cell(int(c))));
        max_vertices = std::max(max_vertices, m.cell(int(c)).num_vertices());
    }
    EXPECT_GE(max_vertices, 5u);
}

TEST(VoronoiMesh, PerturbationIsDeterministic)
{
    EXPECT_EQ(perturbed_grid_sites(5, 0.3, 3), perturbed_grid_sites(5, 0.3, 3));
    EXPECT_NE(perturbed_grid_sites(5, 0.3, 3), perturbed_grid_sites(5, 0.3, 4));
}

TEST(PolytopalMesh, IncidenceDuality)
{
    auto m = voronoi_mesh(3);
    expect_consistent(m);
    for (int d = 0; d <= 2; ++d)
    {
        const auto& self = m.get_faces(d, d);
        for (std::size_t i = 0; i < self.size(); ++i)
            EXPECT_EQ(self[i][0], int(i));
    }
    // Interior facets have two cells with opposite signs, boundary facets one with +1.
    for (std::size_t f = 0; f < m.num_facets(); ++f)
    {
        const auto d = m.facet_data(int(f));
        if (d.cells.size() == 2)
        {
            EXPECT_EQ(d.signs[0] + d.signs[1], 0);
            EXPECT_LT(d.cells[0], d.cells[1]);
            EXPECT_EQ(d.signs[0], 1);
        }
        else
        {
            ASSERT_EQ(d.cells.size(), 1u);
            EXPECT_EQ(d.signs[0], 1);
            EXPECT_TRUE(m.is_boundary_facet(int(f)));
        }
    }
}

TEST(PolytopalMesh, BoundaryLabels)
{
    auto m = voronoi_mesh(3);
    const auto& labels = m.labels();
    const int b = labels.tag_of("boundary");
    const auto boundary = labels.faces_with_tag(1, b);
    double perimeter = 0.0;
    for (int f : boundary)
    {
        EXPECT_TRUE(m.is_boundary_facet(f));
        perimeter += m.facet_length(f);
    }
    EXPECT_NEAR(perimeter, 4.0, 1e-12);
    EXPECT_THROW(labels.tag_of("nowhere"), Error);
}

TEST(PolytopalMesh, ClockwiseCellsAreReoriented)
{
    std::vector<Point2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto m = PolytopalMesh::from_polygons(v, {{0, 3, 2, 1}});
    EXPECT_DOUBLE_EQ(m.cell(0).area(), 1.0);
    expect_consistent(m);
}

TEST(PolytopalMesh, FacetSharedByThreeCellsRejected)
{
    std::vector<Point2> v = {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {2, 0.5}};
    EXPECT_THROW(PolytopalMesh::from_polygons(v, {{0, 1, 2}, {0, 3, 1}, {1, 0, 4}}), Error);
}
