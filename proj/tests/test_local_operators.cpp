#include "helpers.hpp"
#include "oracles.hpp"

#include "polyhybrid/error.hpp"
#include "polyhybrid/local_operators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polyhybrid;
using testing_helpers::jittered;
using testing_helpers::unit_square;
using testing_helpers::voronoi;

namespace
{

const SpaceOptions ortho{.orthonormal = true};

PointFunction constant(double c)
{
    return scalar_function([c](const Point2&) { return c; });
}

} // namespace

TEST(ConstrainedSolve, HandCases)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd b(1, 2);
    b << 1, 0;
    Eigen::MatrixXd rhs(2, 1);
    rhs << 1, 1;
    Eigen::MatrixXd crhs = Eigen::MatrixXd::Zero(1, 1);
    auto x = constrained_local_solve(a, b, rhs, crhs);
    EXPECT_NEAR(x(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(x(1, 0), 1.0, 1e-15);

    // Rank-deficient A made solvable by the constraint.
    a << 0, 0, 0, 1;
    rhs << 0, 1;
    crhs(0, 0) = 2;
    x = constrained_local_solve(a, b, rhs, crhs);
    EXPECT_NEAR(x(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(x(1, 0), 1.0, 1e-14);
}

TEST(ConstrainedSolve, WithoutConstraintsIsPlainSolve)
{
    Eigen::MatrixXd a(2, 2);
    a << 4, 1, 1, 3;
    Eigen::MatrixXd rhs(2, 2);
    rhs << 1, 0, 2, 1;
    auto x = constrained_local_solve(a, Eigen::MatrixXd(0, 2), rhs, Eigen::MatrixXd(0, 2));
    EXPECT_LT((a * x - rhs).norm(), 1e-14);
}

TEST(ConstrainedSolve, SingularSaddleReported)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd b(1, 2);
    b << 1, 0;
    try
    {
        constrained_local_solve(a, b, Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Zero(1, 1));
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::SingularSaddle);
    }
}

TEST(L2Projection, IdentityAndZero)
{
    auto mesh = jittered(3);
    auto s = broken_space(mesh, 2, 2);
    const auto& b = s->basis(0);
    const auto q = s->quadrature(0);
    EXPECT_TRUE(l2_projection_matrix(b, b, q).isApprox(Eigen::MatrixXd::Identity(6, 6), 1e-10));

    auto p = l2_projector(s, s);
    auto g = interpolate(s, scalar_function([](const Point2& x) { return x.x() * x.y() - 1; }));
    EXPECT_LT((p.apply({&g}).coefficients() - g.coefficients()).norm(), 1e-10);
    FEFunction zero(s);
    EXPECT_EQ(p.apply({&zero}).coefficients().norm(), 0.0);
}

TEST(L2Projection, DownToLowerDegree)
{
    auto mesh = jittered(3);
    auto hi = broken_space(mesh, 1, 2);
    auto lo = broken_space(mesh, 1, 1, ValueShape::Scalar, ortho);
    const auto g = scalar_function([](const Point2& x) { return x.x() - 2 * x.y(); });
    auto p = l2_projector(lo, hi);
    auto u = interpolate(hi, g, false);
    EXPECT_LT(oracles::coefficient_error(p.apply({&u}), interpolate(lo, g)), 1e-10);
}

TEST(LocalOperator, GatherRejectsWrongInputs)
{
    auto mesh = jittered(2);
    auto s = broken_space(mesh, 2, 1);
    auto p = l2_projector(s, s);
    FEFunction u(s);
    EXPECT_THROW(p.gather(0, {&u, &u}), Error);
}

TEST(Reconstruction, ExactnessSuite)
{
    for (auto mesh : {voronoi(2), jittered(3)})
        for (int k = 0; k <= 2; ++k)
        {
            const auto e = oracles::local_operator_exactness(mesh, k);
            EXPECT_LT(e.reconstruction, 1e-10) << k;
            EXPECT_LT(e.sym_reconstruction, 1e-10) << k;
            EXPECT_LT(e.gradient, 1e-10) << k;
            EXPECT_LT(e.stokes, 1e-10) << k;
            EXPECT_LT(e.divergence, 1e-10) << k;
            EXPECT_LT(e.stabilisation, 1e-20) << k;
        }
}

TEST(Reconstruction, ConstantsPreserved)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    auto cell = broken_space(mesh, 2, 1, ValueShape::Scalar, ortho);
    auto facet = broken_space(mesh, 1, 1, ValueShape::Scalar, ortho);
    auto rec = broken_space(mesh, 2, 2);
    auto r = hho_reconstruction(topo, cell, facet, rec, 8);
    auto ut = interpolate(cell, constant(3.5));
    auto uf = interpolate(facet, constant(3.5));
    auto out = r.apply({&ut, &uf});
    for (int c = 0; c < rec->num_faces(); ++c)
        EXPECT_NEAR(out.evaluate(2, c, {mesh->cell(c).vertex(0)})(0, 0), 3.5, 1e-12);

    const auto diff = difference_operators(r, 8);
    for (int c = 0; c < rec->num_faces(); ++c)
    {
        const auto v = r.gather(c, {&ut, &uf});
        EXPECT_LT((diff.cell[c] * v).norm(), 1e-12);
        for (const auto& m : diff.facets[c])
            EXPECT_LT((m * v).norm(), 1e-12);
    }
}

TEST(Reconstruction, UnitSquareHandSolve)
{
    // v_T = 0 and v_F = mean of x on each side; the elliptic projection is x - 1/2.
    auto mesh = unit_square();
    auto cell = broken_space(mesh, 2, 0);
    auto facet = broken_space(mesh, 1, 0);
    auto rec = broken_space(mesh, 2, 1);
    auto r = hho_reconstruction(cell_patches(mesh), cell, facet, rec, 4);
    FEFunction ut(cell);
    auto uf = interpolate(facet, scalar_function([](const Point2& x) { return x.x(); }));
    auto out = r.apply({&ut, &uf});
    for (const Point2& x : {Point2(0, 0), Point2(0.3, 0.9), Point2(1, 0.5)})
        EXPECT_NEAR(out.evaluate(2, 0, {x})(0, 0), x.x() - 0.5, 1e-14);
}

TEST(Reconstruction, StokesRightHandSidesAgree)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    for (int k = 0; k <= 2; ++k)
    {
        auto cell = broken_space(mesh, 2, k + 1, ValueShape::Vector, ortho);
        auto facet = broken_space(mesh, 1, k, ValueShape::Vector, ortho);
        auto rec = broken_space(mesh, 2, k + 1, ValueShape::Vector);
        auto lap = stokes_velocity_reconstruction(topo, cell, facet, rec, 2 * (k + 3), EllipticRhs::Laplacian);
        auto grad = stokes_velocity_reconstruction(topo, cell, facet, rec, 2 * (k + 3), EllipticRhs::Gradient);
        for (std::size_t c = 0; c < lap.size(); ++c)
            EXPECT_LT((lap.matrix(int(c)) - grad.matrix(int(c))).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(SymReconstruction, RigidModes)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    auto cell = broken_space(mesh, 2, 1, ValueShape::Vector, ortho);
    auto facet = broken_space(mesh, 1, 0, ValueShape::Vector, ortho);
    auto rec = broken_space(mesh, 2, 1, ValueShape::Vector);
    auto r = sym_reconstruction(topo, cell, facet, rec, 6);
    for (auto g : {vector_function([](const Point2&) { return Point2(1.0, -2.0); }),
                   vector_function([](const Point2& x) { return Point2(-x.y(), x.x()); })})
    {
        auto ut = interpolate(cell, g);
        auto uf = interpolate(facet, g);
        EXPECT_LT(oracles::coefficient_error(r.apply({&ut, &uf}), interpolate(rec, g, false)), 1e-10);
    }
}

TEST(GradientReconstruction, ConstantAndLinear)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    auto cell = broken_space(mesh, 2, 1, ValueShape::Vector, ortho);
    auto facet = broken_space(mesh, 1, 0, ValueShape::Vector, ortho);
    auto sym = broken_space(mesh, 2, 0, ValueShape::SymTensor);
    auto g = gradient_reconstruction(topo, cell, facet, sym, 6);

    const auto c = vector_function([](const Point2&) { return Point2(0.3, -0.7); });
    auto ct = interpolate(cell, c);
    auto cf = interpolate(facet, c);
    EXPECT_LT(g.apply({&ct, &cf}).coefficients().cwiseAbs().maxCoeff(), 1e-12);

    // grad v = [[1, 2], [0, 3]], so the symmetric part is [[1, 1], [1, 3]].
    const auto lin = vector_function([](const Point2& x) { return Point2(x.x() + 2 * x.y(), 3 * x.y()); });
    auto lt = interpolate(cell, lin);
    auto lf = interpolate(facet, lin);
    auto out = g.apply({&lt, &lf});
    for (int t = 0; t < sym->num_faces(); ++t)
    {
        const auto v = out.evaluate(2, t, {mesh->cell(t).centroid()});
        EXPECT_NEAR(v(0, 0), 1.0, 1e-12);
        EXPECT_NEAR(v(1, 0), 3.0, 1e-12);
        EXPECT_NEAR(v(2, 0), std::sqrt(2.0), 1e-12);
    }
}

TEST(DivergenceReconstruction, SolenoidalLinearField)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    auto cell = broken_space(mesh, 2, 1, ValueShape::Vector, ortho);
    auto facet = broken_space(mesh, 1, 0, ValueShape::Vector, ortho);
    auto d = divergence_reconstruction(topo, cell, facet, broken_space(mesh, 2, 0), 6);
    const auto g = vector_function([](const Point2& x) { return Point2(x.x(), -x.y()); });
    auto ut = interpolate(cell, g);
    auto uf = interpolate(facet, g);
    EXPECT_LT(d.apply({&ut, &uf}).coefficients().cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Stabilisation, DirectMatrixVanishesOnKernel)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    const int k = 1;
    auto cell = broken_space(mesh, 2, k, ValueShape::Scalar, ortho);
    auto facet = broken_space(mesh, 1, k, ValueShape::Scalar, ortho);
    auto rec = broken_space(mesh, 2, k + 1);
    auto r = hho_reconstruction(topo, cell, facet, rec, 8);
    const oracles::Polynomial w(k + 1, 5);
    const auto g = scalar_function([&](const Point2& x) { return w(x); });
    auto ut = interpolate(cell, g);
    auto uf = interpolate(facet, g);

    PatchAssembler assembler(topo, {Field::cell(cell), Field::facet(facet), Field::cell(rec)}, 8);
    for (int p = 0; p < int(assembler.num_patches()); ++p)
    {
        const auto s = hho_stabilisation_local(assembler.context(p), r.matrix(p), 0, 1, 2, 1.0);
        EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-12 * s.norm());
        const auto v = r.gather(p, {&ut, &uf});
        EXPECT_LT(std::abs(v.dot(s * v)), 1e-12 * s.norm() * v.squaredNorm());
        // positive semidefinite
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()));
        EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10 * s.norm());
    }
}
