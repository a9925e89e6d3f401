#include "helpers.hpp"
#include "oracles.hpp"

#include "polyhybrid/cases.hpp"
#include "polyhybrid/drivers.hpp"
#include "polyhybrid/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace polyhybrid;
using testing_helpers::jittered;
using testing_helpers::share;
using testing_helpers::unit_square;
using testing_helpers::voronoi;

namespace
{

constexpr double fd_step = 1e-3;

const std::vector<Point2> probe_points = {{0.13, 0.71}, {0.5, 0.5}, {0.82, 0.27}, {0.33, 0.05}};

double fd_laplacian(const ScalarField& u, const Point2& x)
{
    const double h = fd_step;
    return (u(x + Point2(h, 0)) + u(x - Point2(h, 0)) + u(x + Point2(0, h)) + u(x - Point2(0, h)) - 4 * u(x))
         / (h * h);
}

Point2 fd_gradient(const ScalarField& u, const Point2& x)
{
    const double h = fd_step;
    return {(u(x + Point2(h, 0)) - u(x - Point2(h, 0))) / (2 * h), (u(x + Point2(0, h)) - u(x - Point2(0, h))) / (2 * h)};
}

/// Divergence of a tensor field, row-wise.
Point2 fd_divergence(const TensorField& t, const Point2& x)
{
    const double h = fd_step;
    const Eigen::Matrix2d dx = (t(x + Point2(h, 0)) - t(x - Point2(h, 0))) / (2 * h);
    const Eigen::Matrix2d dy = (t(x + Point2(0, h)) - t(x - Point2(0, h))) / (2 * h);
    return {dx(0, 0) + dy(0, 1), dx(1, 0) + dy(1, 1)};
}

double domain_integral(const ScalarField& g)
{
    const auto q = cell_quadrature(unit_square()->cell(0), 20);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * g(q.points[i]);
    return s;
}

RunParameters params_for(const std::string& name)
{
    RunParameters p;
    p.case_name = name;
    return p;
}

double last_eoc_l2(const std::vector<ConvergenceRow>& rows)
{
    return rows.back().eoc_l2;
}

} // namespace

TEST(Cases, PoissonResiduals)
{
    for (const std::string name : {"quadratic", "sine", "constant", "zero"})
    {
        const auto c = poisson_case(name);
        for (const auto& x : probe_points)
        {
            EXPECT_NEAR(-fd_laplacian(c.u, x), c.f(x), 1e-5 * (1 + std::abs(c.f(x)))) << name;
            EXPECT_LT((fd_gradient(c.u, x) - c.grad(x)).norm(), 1e-5) << name;
        }
    }
    EXPECT_THROW(poisson_case("nope"), Error);
}

TEST(Cases, ElasticityResiduals)
{
    const double lambda = 1.5, mu = 0.7;
    for (const std::string name : {"rigid", "quadratic", "sine"})
    {
        const auto c = elasticity_case(name, lambda, mu);
        const TensorField stress = [&](const Point2& x) {
            const Eigen::Matrix2d g = c.grad(x);
            return Eigen::Matrix2d(mu * (g + g.transpose()) + lambda * g.trace() * Eigen::Matrix2d::Identity());
        };
        for (const auto& x : probe_points)
        {
            EXPECT_LT((-fd_divergence(stress, x) - c.f(x)).norm(), 1e-5 * (1 + c.f(x).norm())) << name;
            const Point2 g0 = fd_gradient([&](const Point2& y) { return c.u(y).x(); }, x);
            const Point2 g1 = fd_gradient([&](const Point2& y) { return c.u(y).y(); }, x);
            EXPECT_LT((g0 - Point2(c.grad(x).row(0).transpose())).norm(), 1e-5) << name;
            EXPECT_LT((g1 - Point2(c.grad(x).row(1).transpose())).norm(), 1e-5) << name;
        }
    }
}

TEST(Cases, StokesResiduals)
{
    for (const std::string name : {"linear", "smooth"})
    {
        const auto c = stokes_case(name);
        for (const auto& x : probe_points)
        {
            const Point2 lap(fd_laplacian([&](const Point2& y) { return c.u(y).x(); }, x),
                             fd_laplacian([&](const Point2& y) { return c.u(y).y(); }, x));
            const Point2 r = -lap + fd_gradient(c.p, x) - c.f(x);
            EXPECT_LT(r.norm(), 1e-5 * (1 + c.f(x).norm())) << name;
            EXPECT_NEAR(c.grad(x).trace(), 0.0, 1e-12) << name;
        }
        EXPECT_NEAR(domain_integral(c.p), 0.0, 1e-12) << name;
    }
}

TEST(Cases, ControlOptimality)
{
    const auto c = control_case("constructed", 0.1, -1.0, 0.5);
    for (const auto& x : probe_points)
    {
        EXPECT_NEAR(-fd_laplacian(c.u, x), c.f(x) + c.z(x), 1e-5 * (1 + std::abs(c.f(x))));
        EXPECT_NEAR(-fd_laplacian(c.p, x), c.u(x) - c.u_d(x), 1e-5 * (1 + std::abs(c.u_d(x))));
        EXPECT_DOUBLE_EQ(c.z(x), clamp_control(-c.p(x) / c.alpha, c.za, c.zb));
    }
    EXPECT_NEAR(c.p(Point2(0, 0.3)), 0.0, 1e-15);
    EXPECT_NEAR(c.u(Point2(0.6, 1)), 0.0, 1e-15);
    // The upper bound is active near the centre.
    EXPECT_DOUBLE_EQ(c.z(Point2(0.5, 0.5)), 0.5);
}

TEST(ErrorNorms, ClosedForms)
{
    auto mesh = unit_square();
    auto space = broken_space(mesh, 2, 1);
    FEFunction zero(space);
    const GradientFunction no_grad = [](const Point2&) { return Eigen::MatrixXd::Zero(1, 2); };
    const auto one = error_norms(zero, scalar_function([](const Point2&) { return 1.0; }), no_grad, 4);
    EXPECT_NEAR(one.l2, 1.0, 1e-14);
    EXPECT_NEAR(one.h1, 0.0, 1e-14);

    const GradientFunction gx = [](const Point2&) {
        Eigen::MatrixXd g(1, 2);
        g << 1, 0;
        return g;
    };
    const auto lin = error_norms(zero, scalar_function([](const Point2& x) { return x.x(); }), gx, 4);
    EXPECT_NEAR(lin.l2, 1.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(lin.h1, 1.0, 1e-14);

    auto u = interpolate(space, scalar_function([](const Point2& x) { return x.x(); }));
    const auto exact = error_norms(u, scalar_function([](const Point2& x) { return x.x(); }), gx, 4);
    EXPECT_LT(exact.l2, 1e-13);
    EXPECT_LT(exact.h1, 1e-13);
}

TEST(Eoc, Helpers)
{
    EXPECT_NEAR(eoc(1.0, 0.5, 0.1, 0.05), 1.0, 1e-14);
    EXPECT_NEAR(eoc(1.0, 0.25, 0.1, 0.05), 2.0, 1e-14);
    EXPECT_TRUE(std::isnan(eoc(1e-11, 1e-12, 0.1, 0.05)));

    const auto rows = convergence_study(
        [](int n) {
            SolveReport r;
            r.n = n;
            r.h = 1.0 / n;
            r.err_l2 = std::pow(r.h, 3);
            r.err_h1 = std::pow(r.h, 2);
            r.extra["p_l2"] = r.h;
            return r;
        },
        {4, 8, 16});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_TRUE(std::isnan(rows[0].eoc_l2));
    EXPECT_NEAR(rows[2].eoc_l2, 3.0, 1e-12);
    EXPECT_NEAR(rows[2].eoc_h1, 2.0, 1e-12);
    EXPECT_NEAR(rows[2].eoc_extra.at("p_l2"), 1.0, 1e-12);
    EXPECT_THROW(convergence_study("hho", 1, {4}, {}), Error);
}

TEST(Dg, QuadraticReproduced)
{
    const auto c = poisson_case("quadratic");
    for (int n : {2, 4})
    {
        const auto r = solve_dg_poisson(jittered(n), 2, default_dg_penalty(2), c);
        EXPECT_LT(r.err_l2, 1e-10) << n;
    }
}

TEST(Dg, SystemSymmetricAndConsistent)
{
    auto mesh = jittered(4);
    auto space = dg_space(mesh, 2);
    const auto c = poisson_case("quadratic");
    const auto sys = dg_poisson_system(space, default_dg_penalty(2), c);
    const Eigen::MatrixXd a(sys.matrix);
    EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
    // The interpolant is continuous and matches the boundary data, so every jump term vanishes.
    const auto u = interpolate(space, scalar_function(c.u));
    EXPECT_LT((sys.matrix * u.coefficients() - sys.rhs).norm(), 1e-10 * sys.rhs.norm());
    EXPECT_THROW(dg_poisson_system(space, 0.0, c), Error);
}

TEST(Dg, SineRates)
{
    const auto rows = convergence_study("dg", 1, {8, 16, 32}, params_for("sine"));
    EXPECT_GE(last_eoc_l2(rows), 1.8);
    EXPECT_LE(last_eoc_l2(rows), 2.3);
    EXPECT_GE(rows.back().eoc_h1, 0.7);
}

TEST(Hdg, Exactness)
{
    const auto r = solve_hdg_poisson(jittered(4), 1, 1.0, poisson_case("quadratic"));
    EXPECT_LT(r.err_l2, 1e-9);
    EXPECT_LT(r.extra.at("flux_l2"), 1e-8);
    const auto z = solve_hdg_poisson(jittered(3), 0, 1.0, poisson_case("zero"));
    EXPECT_EQ(z.err_l2, 0.0);
    EXPECT_EQ(z.fields.at("u").coefficients().norm(), 0.0);
    EXPECT_THROW(solve_hdg_poisson(jittered(3), 0, -1.0, poisson_case("zero")), Error);
}

TEST(Hdg, SineRatesIncludingFlux)
{
    for (int k : {0, 1})
    {
        const auto rows = convergence_study("hdg", k, {8, 16, 32}, params_for("sine"));
        EXPECT_GE(last_eoc_l2(rows), k + 1.7) << k;
        EXPECT_GE(rows.back().eoc_extra.at("flux_l2"), k + 0.7) << k;
    }
}

TEST(Hho, ExactnessAndConstants)
{
    const auto r = solve_hho_poisson(jittered(4), 1, poisson_case("quadratic"));
    EXPECT_LT(r.err_l2, 1e-9);
    const auto c = poisson_case("constant");
    const auto s = solve_hho_poisson(jittered(3), 0, c);
    EXPECT_LT(s.err_l2, 1e-11);
    EXPECT_LT(s.err_h1, 1e-10);
    EXPECT_LT(s.extra.at("cell_l2"), 1e-11);
}

TEST(Hho, StabilisationMergeMatchesDirectMatrix)
{
    auto mesh = jittered(3);
    auto topo = cell_patches(mesh);
    const SpaceOptions ortho{.orthonormal = true};
    for (int k : {0, 1})
    {
        auto cell = broken_space(mesh, 2, k, ValueShape::Scalar, ortho);
        auto facet = broken_space(mesh, 1, k, ValueShape::Scalar, ortho);
        auto rec = broken_space(mesh, 2, k + 1);
        auto r = hho_reconstruction(topo, cell, facet, rec, 2 * (k + 2));
        PatchAssembler assembler(topo, {Field::cell(cell), Field::facet(facet), Field::cell(rec)}, 2 * (k + 2));
        PatchSystem ps;
        for (int p = 0; p < int(assembler.num_patches()); ++p)
        {
            assembler.assemble(p, {0, 1}, {0, 1}, {}, ps);
            const auto& ctx = assembler.context(p);
            const double scale = 1.0 / ctx.h_T;
            const auto terms = hho_stabilisation_terms(ctx, r.matrix(p), 0, 1, 2, scale, patch_dofs(ps));
            ASSERT_EQ(terms.size(), 4u);
            merge_mixed_blocks(terms, ps);
            const auto direct = hho_stabilisation_local(ctx, r.matrix(p), 0, 1, 2, scale);
            EXPECT_LT((ps.matrix - direct).cwiseAbs().maxCoeff(), 1e-12 * direct.cwiseAbs().maxCoeff());
        }
    }
}

TEST(Hho, SineRateExample)
{
    const auto rows = convergence_study("hho", 1, {8, 16, 32}, params_for("sine"));
    EXPECT_GE(last_eoc_l2(rows), 2.7);
    EXPECT_GE(rows.back().eoc_h1, 1.7);
}

TEST(Elasticity, RigidAndQuadratic)
{
    RunParameters p;
    p.lambda = 2.0;
    p.mu = 0.5;
    for (int k : {0, 1})
    {
        p.case_name = "rigid";
        EXPECT_LT(run_method("elasticity", jittered(4), k, p).err_l2, 1e-10) << k;
    }
    p.case_name = "quadratic";
    EXPECT_LT(run_method("elasticity", jittered(4), 1, p).err_l2, 1e-8);
    p.lambda = -1;
    EXPECT_THROW(run_method("elasticity", jittered(2), 0, p), Error);
}

TEST(Elasticity, CondensedOperatorSymmetric)
{
    auto problem = hho_elasticity_problem(jittered(3), 1, elasticity_case("sine", 1.0, 1.0));
    const Eigen::MatrixXd d(condense(problem).matrix);
    EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-12 * d.cwiseAbs().maxCoeff());
}

TEST(Stokes, LinearFlowAndPressureMean)
{
    for (int k : {0, 1})
    {
        const auto r = solve_hho_stokes(jittered(4), k, stokes_case("linear"));
        EXPECT_LT(r.err_l2, 1e-9) << k;
        EXPECT_LT(std::abs(r.extra.at("pressure_mean")), 1e-11) << k;
        EXPECT_LT(r.extra.at("pressure_l2"), 1e-8) << k;
    }
    const auto s = solve_hho_stokes(jittered(4), 1, stokes_case("smooth"));
    EXPECT_LT(std::abs(s.extra.at("pressure_mean")), 1e-11);
    EXPECT_FALSE(s.notes.empty());
}

TEST(Control, UnboundedControlIsScaledAdjoint)
{
    const double alpha = 0.1;
    const auto inf = std::numeric_limits<double>::infinity();
    const auto c = control_case("constructed", alpha, -inf, inf);
    const auto r = solve_hho_optimal_control(jittered(4), 0, c);
    const Eigen::VectorXd z = r.fields.at("z").coefficients();
    const Eigen::VectorXd p = r.fields.at("p").coefficients();
    EXPECT_LT((z + p / alpha).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, z.cwiseAbs().maxCoeff()));
    EXPECT_LT(r.extra.at("fixed_point_increment"), 1e-10);
}

TEST(Control, LargeAlphaRecoversStateSolve)
{
    const auto mesh = jittered(4);
    const auto c = control_case("constructed", 1e8, -1.0, 0.5);
    const auto r = solve_hho_optimal_control(mesh, 0, c);
    const auto plain = solve_hybrid(hho_control_state_problem(mesh, 0, c), {.kind = SolverKind::Lu});
    const Eigen::VectorXd u = r.fields.at("u").coefficients();
    EXPECT_LT((u - plain.interior).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(r.fields.at("z").coefficients().cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Control, IterationLimitReported)
{
    const auto c = control_case("constructed", 0.1, -1.0, 0.5);
    try
    {
        solve_hho_optimal_control(jittered(3), 0, c, {}, {.tol = 1e-30, .maxit = 3});
        FAIL();
    }
    catch (const NotConverged& e)
    {
        EXPECT_EQ(e.iterations(), 3);
    }
    EXPECT_THROW(solve_hho_optimal_control(jittered(3), 0, control_case("constructed", 0.1, 1.0, -1.0)), Error);
    EXPECT_THROW(solve_hho_optimal_control(jittered(3), 2, c), Error);
}

TEST(Dispatch, NamesDefaultsAndNotes)
{
    EXPECT_EQ(method_names().size(), 6u);
    EXPECT_EQ(default_case("stokes"), "smooth");
    EXPECT_EQ(default_case("control"), "constructed");
    EXPECT_EQ(default_case("hho"), "sine");

    RunParameters p;
    p.case_name = "quadratic";
    const auto r = run_method("dg", jittered(3), 2, p);
    ASSERT_FALSE(r.notes.empty());
    EXPECT_NE(r.notes[0].find("default penalty"), std::string::npos);
    EXPECT_LT(r.err_l2, 1e-10);

    p.gamma = 30.0;
    EXPECT_TRUE(run_method("dg", jittered(3), 2, p).notes.empty());
    EXPECT_THROW(run_method("fem", jittered(3), 1, p), Error);
    EXPECT_THROW(hybrid_problem("dg", jittered(3), 1, p), Error);
    EXPECT_THROW(run_method("dg", jittered(3), 0, p), Error);
}

TEST(Dispatch, SolverChoiceDoesNotChangeSolution)
{
    RunParameters p;
    p.case_name = "sine";
    p.driver.solver.kind = SolverKind::Cg;
    p.driver.solver.tol = 1e-13;
    const auto cg = run_method("hho", jittered(5), 1, p);
    p.driver.solver.kind = SolverKind::Lu;
    const auto lu = run_method("hho", jittered(5), 1, p);
    EXPECT_NEAR(cg.err_l2, lu.err_l2, 1e-9 * lu.err_l2);
    EXPECT_GT(cg.stats.iterations, 0);
}
