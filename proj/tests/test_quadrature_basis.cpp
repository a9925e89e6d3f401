#include "polyhybrid/basis.hpp"
#include "polyhybrid/error.hpp"
#include "polyhybrid/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace polyhybrid;

namespace
{

Polygon unit_square()
{
    return Polygon::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

Polygon pentagon()
{
    return Polygon::from_vertices({{0.1, 0.0}, {0.9, 0.1}, {1.0, 0.7}, {0.45, 1.0}, {0.0, 0.6}});
}

template <class F>
double integrate(const QuadratureRule& q, F f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * f(q.points[i]);
    return s;
}

} // namespace

TEST(Quadrature, GaussLegendreOnUnitInterval)
{
    std::vector<double> x, w;
    gauss_legendre(3, x, w);
    ASSERT_EQ(x.size(), 3u);
    double sum = 0.0, fifth = 0.0;
    for (int i = 0; i < 3; ++i)
    {
        EXPECT_GT(w[i], 0.0);
        sum += w[i];
        fifth += w[i] * std::pow(x[i], 5);
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_NEAR(fifth, 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, UnitSquareMonomials)
{
    auto q = cell_quadrature(unit_square(), 4);
    EXPECT_NEAR(q.measure(), 1.0, 1e-14);
    EXPECT_NEAR(integrate(q, [](const Point2& p) { return p.x() * p.x(); }), 1.0 / 3.0, 1e-13);
    for (double w : q.weights)
        EXPECT_GT(w, 0.0);
}

TEST(Quadrature, TriangleBetaIntegral)
{
    auto q = triangle_quadrature({0, 0}, {1, 0}, {0, 1}, 4);
    EXPECT_NEAR(integrate(q, [](const Point2& p) { return p.x() * p.x() * p.y() * p.y(); }), 1.0 / 180.0, 1e-15);
}

TEST(Quadrature, TriangleExactnessSweep)
{
    // int x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    auto fact = [](int n) { return std::tgamma(n + 1.0); };
    for (int deg = 0; deg <= 10; ++deg)
    {
        auto q = triangle_quadrature({0, 0}, {1, 0}, {0, 1}, deg);
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b)
            {
                const double exact = fact(a) * fact(b) / fact(a + b + 2);
                const double got =
                    integrate(q, [&](const Point2& p) { return std::pow(p.x(), a) * std::pow(p.y(), b); });
                EXPECT_NEAR(got, exact, 1e-14) << deg << " " << a << " " << b;
            }
    }
}

TEST(Quadrature, PolygonAgainstShoelaceMoments)
{
    const auto p = pentagon();
    auto q = cell_quadrature(p, 2);
    EXPECT_NEAR(q.measure(), p.area(), 1e-15);
    EXPECT_NEAR(integrate(q, [](const Point2& x) { return x.x(); }) / p.area(), p.centroid().x(), 1e-14);
    EXPECT_NEAR(integrate(q, [](const Point2& x) { return x.y(); }) / p.area(), p.centroid().y(), 1e-14);
}

TEST(Quadrature, NonStarShapedRejected)
{
    // Thin comb whose centroid lies outside one tooth.
    auto p = Polygon::from_vertices({{0, 0}, {3, 0}, {3, 3}, {2.9, 3}, {2.9, 0.1}, {0.1, 0.1}, {0.1, 3}, {0, 3}});
    try
    {
        cell_quadrature(p, 2);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::NonStarShaped);
    }
}

TEST(Quadrature, FacetRules)
{
    auto q = facet_quadrature({0, 0}, {1, 0}, 3);
    EXPECT_EQ(q.size(), 2u);
    EXPECT_NEAR(q.measure(), 1.0, 1e-15);
    EXPECT_NEAR(integrate(q, [](const Point2& p) { return std::pow(p.x(), 3); }), 0.25, 1e-15);

    auto slanted = facet_quadrature({1, 1}, {4, 5}, 6);
    EXPECT_EQ(slanted.size(), 4u);
    EXPECT_NEAR(slanted.measure(), 5.0, 1e-14);
    // arc length s = 5 t, so int s^6 ds = 5^7 / 7
    const double got = integrate(slanted, [](const Point2& p) { return std::pow((p - Point2(1, 1)).norm(), 6); });
    EXPECT_NEAR(got, std::pow(5.0, 7) / 7.0, 1e-9);
}

TEST(Quadrature, ZeroLengthFacetRejected)
{
    try
    {
        facet_quadrature({0.5, 0.5}, {0.5, 0.5}, 2);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::ZeroLengthFacet);
    }
}

TEST(Basis, Counts)
{
    EXPECT_EQ(monomial_count(2, 0), 1);
    EXPECT_EQ(monomial_count(2, 2), 6);
    EXPECT_EQ(monomial_count(1, 3), 4);
    EXPECT_EQ(num_components(ValueShape::SymTensor), 3);
    const auto e = monomial_exponents(2);
    ASSERT_EQ(e.size(), 6u);
    EXPECT_EQ(e[1], (std::array<int, 2>{1, 0}));
    EXPECT_EQ(e[5], (std::array<int, 2>{0, 2}));
}

TEST(Basis, DegreeZeroIsConstantOne)
{
    auto b = PolyBasis::cell(pentagon(), 0);
    auto v = b.values({{0.2, 0.3}, {0.9, 0.5}});
    EXPECT_DOUBLE_EQ(v(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(v(0, 1), 1.0);
    auto g = b.gradients({{0.2, 0.3}});
    EXPECT_DOUBLE_EQ(g[0](0, 0), 0.0);
    EXPECT_DOUBLE_EQ(g[1](0, 0), 0.0);
}

TEST(Basis, GradientsAndLaplaciansMatchFiniteDifferences)
{
    const auto p = pentagon();
    auto q = cell_quadrature(p, 8);
    for (auto b : {PolyBasis::cell(p, 3), PolyBasis::cell(p, 3).orthonormalize(q)})
    {
        const Point2 x(0.4, 0.55);
        const double h = 1e-5;
        const auto g = b.gradients({x});
        const auto lap = b.laplacians({x});
        const auto c = b.values({x});
        const auto xp = b.values({x + Point2(h, 0)});
        const auto xm = b.values({x - Point2(h, 0)});
        const auto yp = b.values({x + Point2(0, h)});
        const auto ym = b.values({x - Point2(0, h)});
        for (int i = 0; i < b.scalar_dim(); ++i)
        {
            EXPECT_NEAR(g[0](i, 0), (xp(i, 0) - xm(i, 0)) / (2 * h), 1e-6);
            EXPECT_NEAR(g[1](i, 0), (yp(i, 0) - ym(i, 0)) / (2 * h), 1e-6);
            const double fd = (xp(i, 0) + xm(i, 0) + yp(i, 0) + ym(i, 0) - 4 * c(i, 0)) / (h * h);
            EXPECT_NEAR(lap(i, 0), fd, 1e-3 * (1 + std::abs(lap(i, 0))));
        }
    }
}

TEST(Basis, FacetGradientIsTangential)
{
    const Point2 a(0.2, 0.1), b(0.8, 0.9);
    auto basis = PolyBasis::facet(a, b, 2);
    const Point2 t = (b - a).normalized();
    const Point2 x = 0.3 * a + 0.7 * b;
    const double h = 1e-6;
    const auto g = basis.gradients({x});
    const auto vp = basis.values({x + h * t});
    const auto vm = basis.values({x - h * t});
    for (int i = 0; i < basis.scalar_dim(); ++i)
    {
        const double dt = g[0](i, 0) * t.x() + g[1](i, 0) * t.y();
        EXPECT_NEAR(dt, (vp(i, 0) - vm(i, 0)) / (2 * h), 1e-7);
        EXPECT_NEAR(g[0](i, 0) * t.y() - g[1](i, 0) * t.x(), 0.0, 1e-12);
    }
}

TEST(Basis, OrthonormalizeUnitSquare)
{
    const auto p = unit_square();
    auto q = cell_quadrature(p, 4);
    auto b = PolyBasis::cell(p, 1).orthonormalize(q);
    EXPECT_TRUE(b.scalar_mass(q).isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-10));
    // Lower-triangular change: function i only uses monomials 0..i.
    const auto& c = b.change_of_basis();
    for (int i = 0; i < c.rows(); ++i)
        for (int j = i + 1; j < c.cols(); ++j)
            EXPECT_EQ(c(i, j), 0.0);
}

TEST(Basis, OrthonormalizeIsIdempotent)
{
    const auto p = pentagon();
    auto q = cell_quadrature(p, 6);
    auto b = PolyBasis::cell(p, 2).orthonormalize(q);
    auto again = b.orthonormalize(q);
    EXPECT_LT((again.change_of_basis() - b.change_of_basis()).norm(), 1e-10 * b.change_of_basis().norm());
}

TEST(Basis, ZeroMeanRestriction)
{
    const auto p = unit_square();
    auto q = cell_quadrature(p, 4);
    auto b = PolyBasis::cell(p, 1).zero_mean(q);
    EXPECT_EQ(b.scalar_dim(), 2);
    EXPECT_TRUE(b.is_zero_mean());
    const auto v = b.values(q.points);
    for (int i = 0; i < 2; ++i)
    {
        double mean = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j)
            mean += q.weights[j] * v(i, j);
        EXPECT_NEAR(mean, 0.0, 1e-15);
    }
    try
    {
        PolyBasis::cell(p, 0).zero_mean(q);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::DegreeTooLow);
    }
}

TEST(Basis, VectorAndTensorComponents)
{
    const auto p = pentagon();
    auto v = PolyBasis::cell(p, 1, ValueShape::Vector);
    EXPECT_EQ(v.dim(), 6);
    auto t = PolyBasis::cell(p, 1, ValueShape::SymTensor);
    EXPECT_EQ(t.dim(), 9);
    const auto c1 = v.component_values({{0.5, 0.5}}, 1);
    // Component-major: the first scalar_dim functions have no second component.
    for (int i = 0; i < 3; ++i)
        EXPECT_EQ(c1(i, 0), 0.0);
    EXPECT_DOUBLE_EQ(c1(3, 0), 1.0);
}

TEST(Basis, ToMonomialsRoundTrip)
{
    const auto p = pentagon();
    auto q = cell_quadrature(p, 6);
    auto b = PolyBasis::cell(p, 2).orthonormalize(q);
    Eigen::VectorXd coeffs(6);
    coeffs << 1, -2, 0.5, 3, 0, 1;
    const Eigen::VectorXd mono = b.to_monomials(coeffs);
    auto raw = PolyBasis::cell(p, 2);
    const Point2 x(0.3, 0.6);
    EXPECT_NEAR((b.values({x}).transpose() * coeffs)(0), (raw.values({x}).transpose() * mono)(0), 1e-12);
}
