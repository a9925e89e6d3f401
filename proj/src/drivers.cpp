#include "polyhybrid/drivers.hpp"

#include "polyhybrid/error.hpp"
#include "polyhybrid/patch_assembly.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>

namespace polyhybrid
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int assembly_degree(int k)
{
    return 2 * (k + 2);
}

int norm_degree(int k)
{
    return 2 * (k + 2) + 2;
}

SpaceOptions cell_options()
{
    SpaceOptions o;
    o.orthonormal = true;
    return o;
}

SpaceOptions facet_options(bool dirichlet)
{
    SpaceOptions o;
    o.orthonormal = true;
    if (dirichlet)
        o.dirichlet_tags = {"boundary"};
    return o;
}

GradientFunction scalar_gradient(VectorField g)
{
    return [g = std::move(g)](const Point2& x) {
        Eigen::MatrixXd m(1, 2);
        m.row(0) = g(x).transpose();
        return m;
    };
}

GradientFunction tensor_gradient(TensorField g)
{
    return [g = std::move(g)](const Point2& x) { return Eigen::MatrixXd(g(x)); };
}

GradientFunction zero_gradient(int components)
{
    return [components](const Point2&) { return Eigen::MatrixXd::Zero(components, 2).eval(); };
}

/// Load vector (v, f) of a cell field; f has one value per component.
Eigen::VectorXd load_vector(const PatchContext& ctx, int field, const PointFunction& f)
{
    const auto& fe = ctx.fields[field];
    const int nc = static_cast<int>(fe.values.size());
    Eigen::MatrixXd fv(nc, static_cast<Eigen::Index>(ctx.quad.size()));
    for (std::size_t i = 0; i < ctx.quad.size(); ++i)
        fv.col(i) = f(ctx.quad.points[i]);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(fe.dim);
    for (int c = 0; c < nc; ++c)
        b += fe.values[c] * ctx.weights.cwiseProduct(fv.row(c).transpose());
    return b;
}

Eigen::MatrixXd stiffness(const FieldEval& fe, const Eigen::VectorXd& w)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(fe.dim, fe.dim);
    for (const auto& g : fe.grads)
        for (int d = 0; d < 2; ++d)
            a += weighted_product(g[d], w, g[d]);
    return a;
}

Eigen::MatrixXd facet_mass(const FieldEval& ff, std::size_t l, const Eigen::VectorXd& w)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ff.facet_dim[l], ff.facet_dim[l]);
    for (const auto& v : ff.facet_values[l])
        m += weighted_product(v, w, v);
    return m;
}

/// Facet L2 projection of the trace of a cell field, (facet dim x cell dim).
Eigen::MatrixXd trace_projection(const FieldEval& cf, const FieldEval& ff, std::size_t l, const Eigen::VectorXd& w)
{
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(ff.facet_dim[l], cf.dim);
    for (std::size_t c = 0; c < cf.trace[l].size(); ++c)
        b += weighted_product(ff.facet_values[l][c], w, cf.trace[l][c]);
    return facet_mass(ff, l, w).llt().solve(b);
}

/// sum_F h_F^{-1} int_F (Pi_F v_T - v_F) . (Pi_F w_T - w_F) on [cell; facets] coordinates.
Eigen::MatrixXd lehrenfeld_schoeberl(const PatchContext& ctx, int cell_field, int facet_field)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const int n = cf.dim + ff.dim;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pf = ctx.facets[l];
        const int df = ff.facet_dim[l];
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(df, n);
        d.leftCols(cf.dim) = trace_projection(cf, ff, l, pf.weights);
        d.middleCols(cf.dim + ff.facet_offset[l], df) = -Eigen::MatrixXd::Identity(df, df);
        s += d.transpose() * facet_mass(ff, l, pf.weights) * d / pf.h;
    }
    return s;
}

/// Adds a matrix on [cell; facets] coordinates into the four blocks of a hybrid pair.
void add_hybrid_block(PatchSystem& ps, int cell_field, int facet_field, const Eigen::MatrixXd& m)
{
    const int nt = ps.row_dim(cell_field);
    const int nf = ps.row_dim(facet_field);
    ps.add_block(cell_field, cell_field, m.topLeftCorner(nt, nt));
    ps.add_block(cell_field, facet_field, m.topRightCorner(nt, nf));
    ps.add_block(facet_field, cell_field, m.bottomLeftCorner(nf, nt));
    ps.add_block(facet_field, facet_field, m.bottomRightCorner(nf, nf));
}

/// Rows of a cell-by-[cell; facets] coupling matrix into two blocks.
void add_coupling(PatchSystem& ps, int row_field, int cell_field, int facet_field, const Eigen::MatrixXd& m)
{
    const int nt = ps.col_dim(cell_field);
    const int nf = ps.col_dim(facet_field);
    ps.add_block(row_field, cell_field, m.leftCols(nt));
    ps.add_block(row_field, facet_field, m.rightCols(nf));
    ps.add_block(cell_field, row_field, m.leftCols(nt).transpose());
    ps.add_block(facet_field, row_field, m.rightCols(nf).transpose());
}

/// Problem on `space` whose patch contexts also evaluate `extra` fields.
HybridProblem make_problem(std::shared_ptr<const PatchTopology> topo, const BlockSpace& space,
                           std::vector<Field> extra, int quad_degree, PatchForm form,
                           Eigen::VectorXd skeleton_values)
{
    HybridProblem problem;
    problem.layout = std::make_shared<CondensationLayout>(space, *topo);
    auto fields = space.fields();
    fields.insert(fields.end(), extra.begin(), extra.end());
    std::vector<int> system(space.num_fields());
    std::iota(system.begin(), system.end(), 0);
    problem.make_source = [topo, fields, system, quad_degree, form]() -> PatchSource {
        auto assembler = std::make_shared<PatchAssembler>(topo, fields, quad_degree);
        return [assembler, system, form](int p, PatchSystem& ps) { assembler->assemble(p, system, system, {form}, ps); };
    };
    problem.skeleton_values = std::move(skeleton_values);
    return problem;
}

/// Skeleton vector holding the given field coefficients at their block offsets.
Eigen::VectorXd skeleton_vector(const BlockSpace& space, const std::vector<std::pair<int, Eigen::VectorXd>>& data)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(space.num_blocks() > 1 ? space.block_dim(1) : 0);
    for (const auto& [field, coeffs] : data)
        v.segment(space.field_offset(field), coeffs.size()) = coeffs;
    return v;
}

FEFunction field_function(const BlockSpace& space, int field, const HybridSolution& sol)
{
    const auto& vec = space.block_of(field) == 0 ? sol.interior : sol.skeleton;
    return FEFunction(space.field(field).space, vec.segment(space.field_offset(field), space.field(field).dim()));
}

int full_dofs(const BlockSpace& space)
{
    return space.dim();
}

/// Condense, solve and back-substitute with timings recorded in the report.
HybridSolution run_hybrid(const HybridProblem& problem, const DriverOptions& opts, SolveReport& report,
                          Clock::time_point t0)
{
    const auto cs = condense(problem, opts.threads);
    report.time_setup = seconds_since(t0);
    const auto t1 = Clock::now();
    HybridSolution sol;
    const Eigen::VectorXd free = solve_condensed(cs, opts.solver, &sol.stats);
    sol.skeleton = expand_skeleton(cs, free);
    sol.interior = back_substitute(cs, sol.skeleton);
    report.time_solve = seconds_since(t1);
    report.stats = sol.stats;
    report.dofs_condensed = problem.layout->num_free();
    return sol;
}

void check_degree(int k, int min_k, const char* method, int max_k = std::numeric_limits<int>::max())
{
    if (k < min_k)
        fail(ErrorCode::InvalidArgument,
             std::string(method) + " needs k >= " + std::to_string(min_k) + ", got " + std::to_string(k));
    if (k > max_k)
        fail(ErrorCode::InvalidArgument,
             std::string(method) + " supports k <= " + std::to_string(max_k) + ", got " + std::to_string(k));
}

SolveReport new_report(const std::string& method, const PolytopalMesh& mesh, int k)
{
    SolveReport r;
    r.method = method;
    r.k = k;
    r.h = mesh.h_max();
    return r;
}

} // namespace

ErrorNorms error_norms(const FEFunction& uh, const PointFunction& value, const GradientFunction& grad,
                       int quad_degree)
{
    const auto& space = uh.space();
    if (space.slice_dim() != 2)
        fail(ErrorCode::FaceOutOfSlice, "error norms are computed on cell functions");
    double l2 = 0.0;
    double h1 = 0.0;
    for (int t = 0; t < space.num_faces(); ++t)
    {
        const auto q = cell_quadrature(space.mesh().cell(t), quad_degree);
        const Eigen::MatrixXd v = uh.evaluate(2, t, q.points);
        const Eigen::MatrixXd g = uh.gradient(t, q.points);
        for (std::size_t i = 0; i < q.size(); ++i)
        {
            const Eigen::VectorXd exact = value(q.points[i]);
            const Eigen::MatrixXd dexact = grad(q.points[i]);
            l2 += q.weights[i] * (v.col(i) - exact).squaredNorm();
            for (Eigen::Index c = 0; c < dexact.rows(); ++c)
                for (int d = 0; d < 2; ++d)
                {
                    const double e = g(2 * c + d, i) - dexact(c, d);
                    h1 += q.weights[i] * e * e;
                }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

// ---------------------------------------------------------------- DG

double default_dg_penalty(int k)
{
    return 4.0 * k * k + 4.0;
}

std::shared_ptr<BrokenSpace> dg_space(std::shared_ptr<const PolytopalMesh> mesh, int k)
{
    return broken_space(std::move(mesh), 2, k, ValueShape::Scalar, cell_options());
}

LinearSystem dg_poisson_system(const std::shared_ptr<const BrokenSpace>& space, double gamma, const PoissonCase& c)
{
    if (!(gamma > 0.0))
        fail(ErrorCode::InvalidArgument, "penalty parameter must be positive");
    const auto& mesh = space->mesh();
    const int qd = space->quad_degree();
    std::vector<Eigen::Triplet<double>> trip;
    LinearSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(space->dim());

    auto scatter = [&](int ct, int cs, const Eigen::MatrixXd& m) {
        const int ot = space->offset(ct);
        const int os = space->offset(cs);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                trip.emplace_back(ot + i, os + j, m(i, j));
    };

    for (int t = 0; t < space->num_faces(); ++t)
    {
        const auto q = space->quadrature(t, qd);
        const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), static_cast<Eigen::Index>(q.size()));
        const auto& b = space->basis(t);
        const auto g = b.gradients(q.points);
        const Eigen::MatrixXd v = b.values(q.points);
        scatter(t, t, weighted_product(g[0], w, g[0]) + weighted_product(g[1], w, g[1]));
        Eigen::VectorXd fv(q.size());
        for (std::size_t i = 0; i < q.size(); ++i)
            fv(i) = c.f(q.points[i]);
        sys.rhs.segment(space->offset(t), b.dim()) += v * w.cwiseProduct(fv);
    }

    for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f)
    {
        const auto fd = mesh.facet_data(f);
        const auto& fv = mesh.facet_vertices(f);
        const auto q = facet_quadrature(mesh.vertex(fv[0]), mesh.vertex(fv[1]), qd);
        const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), static_cast<Eigen::Index>(q.size()));
        const Point2& n = fd.normal;
        const double pen = gamma / fd.length;
        const std::size_t ns = fd.cells.size();
        const double avg = ns == 2 ? 0.5 : 1.0;
        std::vector<Eigen::MatrixXd> val(ns);
        std::vector<Eigen::MatrixXd> dn(ns);
        for (std::size_t s = 0; s < ns; ++s)
        {
            const auto& b = space->basis(fd.cells[s]);
            val[s] = b.values(q.points);
            const auto g = b.gradients(q.points);
            dn[s] = n.x() * g[0] + n.y() * g[1];
        }
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < ns; ++j)
            {
                const double si = fd.signs[i];
                const double sj = fd.signs[j];
                const Eigen::MatrixXd m = -si * avg * weighted_product(val[i], w, dn[j])
                                        - sj * avg * weighted_product(dn[i], w, val[j])
                                        + pen * si * sj * weighted_product(val[i], w, val[j]);
                scatter(fd.cells[i], fd.cells[j], m);
            }
        if (ns == 1)
        {
            Eigen::VectorXd g(q.size());
            for (std::size_t i = 0; i < q.size(); ++i)
                g(i) = c.u(q.points[i]);
            const double s = fd.signs[0];
            sys.rhs.segment(space->offset(fd.cells[0]), space->face_dim(fd.cells[0]))
                += -s * dn[0] * w.cwiseProduct(g) + pen * val[0] * w.cwiseProduct(g);
        }
    }
    sys.matrix.resize(space->dim(), space->dim());
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

SolveReport solve_dg_poisson(std::shared_ptr<const PolytopalMesh> mesh, int k, double gamma, const PoissonCase& c,
                             DriverOptions opts)
{
    check_degree(k, 1, "dg");
    const auto t0 = Clock::now();
    auto report = new_report("dg", *mesh, k);
    auto space = dg_space(mesh, k);
    const auto sys = dg_poisson_system(space, gamma, c);
    report.time_setup = seconds_since(t0);
    const auto t1 = Clock::now();
    SkeletonSolver solver(sys.matrix, opts.solver);
    FEFunction uh(space, solver.solve(sys.rhs));
    report.time_solve = seconds_since(t1);
    report.stats = solver.stats();
    report.dofs_full = space->dim();
    report.dofs_condensed = space->dim();
    const auto e = error_norms(uh, scalar_function(c.u), scalar_gradient(c.grad), norm_degree(k));
    report.err_l2 = e.l2;
    report.err_h1 = e.h1;
    report.fields.emplace("u", std::move(uh));
    return report;
}

// ---------------------------------------------------------------- HDG

namespace
{

struct HdgSetup
{
    std::shared_ptr<BrokenSpace> flux, cell, facet;
    std::shared_ptr<BlockSpace> space;
};

HdgSetup hdg_setup(const std::shared_ptr<const PolytopalMesh>& mesh, int k)
{
    HdgSetup s;
    s.flux = broken_space(mesh, 2, k, ValueShape::Vector, cell_options());
    s.cell = broken_space(mesh, 2, k + 1, ValueShape::Scalar, cell_options());
    s.facet = broken_space(mesh, 1, k, ValueShape::Scalar, facet_options(true));
    s.space = std::make_shared<BlockSpace>(
        std::vector<Field>{Field::cell(s.flux, "p"), Field::cell(s.cell, "u"), Field::facet(s.facet, "s")},
        std::vector<int>{2, 1});
    return s;
}

} // namespace

namespace
{

HybridProblem hdg_problem(const HdgSetup& s, int k, double tau_scale, const PoissonCase& c)
{
    if (!(tau_scale > 0.0))
        fail(ErrorCode::InvalidArgument, "stabilisation parameter must be positive");
    const auto g = interpolate(s.facet, scalar_function(c.u));
    auto f = scalar_function(c.f);
    PatchForm form = [tau_scale, f](const PatchContext& ctx, PatchSystem& ps) {
        const auto& qf = ctx.fields[0];
        const auto& vf = ctx.fields[1];
        const auto& mf = ctx.fields[2];
        const auto& w = ctx.weights;
        Eigen::MatrixXd qq = Eigen::MatrixXd::Zero(qf.dim, qf.dim);
        for (const auto& v : qf.values)
            qq -= weighted_product(v, w, v);
        ps.add_block(0, 0, qq);
        const Eigen::MatrixXd div = qf.grads[0][0] + qf.grads[1][1];
        const Eigen::MatrixXd qu = -weighted_product(div, w, vf.values[0]);
        ps.add_block(0, 1, qu);
        ps.add_block(1, 0, qu.transpose());
        Eigen::MatrixXd qs = Eigen::MatrixXd::Zero(qf.dim, mf.dim);
        Eigen::MatrixXd stab = Eigen::MatrixXd::Zero(vf.dim + mf.dim, vf.dim + mf.dim);
        for (std::size_t l = 0; l < ctx.facets.size(); ++l)
        {
            const auto& pf = ctx.facets[l];
            const int df = mf.facet_dim[l];
            const Eigen::MatrixXd qn = pf.normal.x() * qf.trace[l][0] + pf.normal.y() * qf.trace[l][1];
            qs.middleCols(mf.facet_offset[l], df) += weighted_product(qn, pf.weights, mf.facet_values[l][0]);
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(df, vf.dim + mf.dim);
            d.leftCols(vf.dim) = trace_projection(vf, mf, l, pf.weights);
            d.middleCols(vf.dim + mf.facet_offset[l], df) = -Eigen::MatrixXd::Identity(df, df);
            stab += (tau_scale / pf.h) * d.transpose() * facet_mass(mf, l, pf.weights) * d;
        }
        ps.add_block(0, 2, qs);
        ps.add_block(2, 0, qs.transpose());
        add_hybrid_block(ps, 1, 2, stab);
        ps.add_vector(1, load_vector(ctx, 1, f));
    };
    return make_problem(cell_patches(s.cell->mesh_ptr()), *s.space, {}, assembly_degree(k + 1), form,
                        skeleton_vector(*s.space, {{2, g.coefficients()}}));
}

} // namespace

HybridProblem hdg_poisson_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, double tau_scale,
                                  const PoissonCase& c)
{
    check_degree(k, 0, "hdg");
    return hdg_problem(hdg_setup(mesh, k), k, tau_scale, c);
}

SolveReport solve_hdg_poisson(std::shared_ptr<const PolytopalMesh> mesh, int k, double tau_scale,
                              const PoissonCase& c, DriverOptions opts)
{
    const auto t0 = Clock::now();
    auto report = new_report("hdg", *mesh, k);
    check_degree(k, 0, "hdg");
    const auto s = hdg_setup(mesh, k);
    const auto problem = hdg_problem(s, k, tau_scale, c);
    const auto sol = run_hybrid(problem, opts, report, t0);
    report.dofs_full = full_dofs(*s.space);
    auto ph = field_function(*s.space, 0, sol);
    auto uh = field_function(*s.space, 1, sol);
    auto sh = field_function(*s.space, 2, sol);
    const auto e = error_norms(uh, scalar_function(c.u), scalar_gradient(c.grad), norm_degree(k + 1));
    report.err_l2 = e.l2;
    report.err_h1 = e.h1;
    report.extra["flux_l2"] = error_norms(ph, vector_function(c.grad), zero_gradient(2), norm_degree(k + 1)).l2;
    report.fields.emplace("u", std::move(uh));
    report.fields.emplace("flux", std::move(ph));
    report.fields.emplace("trace", std::move(sh));
    return report;
}

// ---------------------------------------------------------------- HHO Poisson

std::vector<MixedContribution> hho_stabilisation_terms(const PatchContext& ctx, const Eigen::MatrixXd& reconstruction,
                                                       int cell_field, int facet_field, int out_field, double scale,
                                                       const std::vector<DofRef>& dofs)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const auto& of = ctx.fields[out_field];
    const int n = cf.dim + ff.dim;
    if (static_cast<int>(dofs.size()) != n || reconstruction.cols() != n || reconstruction.rows() != of.dim)
        fail(ErrorCode::DofMapMismatch, "stabilisation terms need the patch DOFs of the hybrid pair");
    const int nc = static_cast<int>(cf.values.size());
    const auto& w = ctx.weights;

    Eigen::MatrixXd mt = Eigen::MatrixXd::Zero(cf.dim, cf.dim);
    Eigen::MatrixXd bt = Eigen::MatrixXd::Zero(cf.dim, of.dim);
    for (int c = 0; c < nc; ++c)
    {
        mt += weighted_product(cf.values[c], w, cf.values[c]);
        bt += weighted_product(cf.values[c], w, of.values[c]);
    }
    const Eigen::MatrixXd cell_proj = mt.llt().solve(bt);

    Eigen::MatrixXd s11 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd s12 = Eigen::MatrixXd::Zero(n, of.dim);
    Eigen::MatrixXd s22 = Eigen::MatrixXd::Zero(of.dim, of.dim);
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pw = ctx.facets[l].weights;
        const int df = ff.facet_dim[l];
        Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(df, of.dim);
        for (int c = 0; c < nc; ++c)
            bf += weighted_product(ff.facet_values[l][c], pw, of.trace[l][c]);
        const Eigen::MatrixXd facet_proj = facet_mass(ff, l, pw).llt().solve(bf);
        for (int c = 0; c < nc; ++c)
        {
            const Eigen::Index np = pw.size();
            Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(np, n);
            s1.leftCols(cf.dim) = cf.trace[l][c].transpose();
            s1.middleCols(cf.dim + ff.facet_offset[l], df) = -ff.facet_values[l][c].transpose();
            const Eigen::MatrixXd s2
                = ff.facet_values[l][c].transpose() * facet_proj - cf.trace[l][c].transpose() * cell_proj;
            s11 += s1.transpose() * pw.asDiagonal() * s1;
            s12 += s1.transpose() * pw.asDiagonal() * s2;
            s22 += s2.transpose() * pw.asDiagonal() * s2;
        }
    }
    const Eigen::MatrixXd t12 = scale * s12 * reconstruction;
    std::vector<MixedContribution> out(4);
    out[0] = {dofs, dofs, scale * s11, {}};
    out[1] = {dofs, dofs, t12, {}};
    out[2] = {dofs, dofs, t12.transpose(), {}};
    out[3] = {dofs, dofs, scale * reconstruction.transpose() * s22 * reconstruction, {}};
    return out;
}

namespace
{

struct HhoSetup
{
    std::shared_ptr<BrokenSpace> cell, facet, recon;
    std::shared_ptr<BlockSpace> space;
};

HhoSetup hho_setup(const std::shared_ptr<const PolytopalMesh>& mesh, int cell_degree, int facet_degree,
                   int recon_degree)
{
    HhoSetup s;
    s.cell = broken_space(mesh, 2, cell_degree, ValueShape::Scalar, cell_options());
    s.facet = broken_space(mesh, 1, facet_degree, ValueShape::Scalar, facet_options(true));
    s.recon = broken_space(mesh, 2, recon_degree, ValueShape::Scalar);
    s.space = std::make_shared<BlockSpace>(std::vector<Field>{Field::cell(s.cell, "u_T"), Field::facet(s.facet, "u_F")},
                                           std::vector<int>{1, 1});
    return s;
}

HybridProblem hho_poisson_problem(const HhoSetup& s, int k, const PoissonCase& c)
{
    const auto g = interpolate(s.facet, scalar_function(c.u));
    auto f = scalar_function(c.f);
    PatchForm form = [f](const PatchContext& ctx, PatchSystem& ps) {
        const Eigen::MatrixXd r = elliptic_reconstruction_local(ctx, 0, 1, 2, EllipticRhs::Gradient);
        add_hybrid_block(ps, 0, 1, r.transpose() * stiffness(ctx.fields[2], ctx.weights) * r);
        const auto terms = hho_stabilisation_terms(ctx, r, 0, 1, 2, 1.0 / ctx.h_T, patch_dofs(ps));
        merge_mixed_blocks(terms, ps);
        ps.add_vector(0, load_vector(ctx, 0, f));
    };
    return make_problem(cell_patches(s.cell->mesh_ptr()), *s.space, {Field::cell(s.recon)}, assembly_degree(k), form,
                        skeleton_vector(*s.space, {{1, g.coefficients()}}));
}

} // namespace

HybridProblem hho_poisson_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const PoissonCase& c)
{
    check_degree(k, 0, "hho");
    return hho_poisson_problem(hho_setup(mesh, k, k, k + 1), k, c);
}

SolveReport solve_hho_poisson(std::shared_ptr<const PolytopalMesh> mesh, int k, const PoissonCase& c,
                              DriverOptions opts)
{
    check_degree(k, 0, "hho");
    const auto t0 = Clock::now();
    auto report = new_report("hho", *mesh, k);
    const auto s = hho_setup(mesh, k, k, k + 1);
    const auto problem = hho_poisson_problem(s, k, c);
    const auto sol = run_hybrid(problem, opts, report, t0);
    report.dofs_full = full_dofs(*s.space);
    auto ut = field_function(*s.space, 0, sol);
    auto uf = field_function(*s.space, 1, sol);
    const auto r = hho_reconstruction(cell_patches(mesh), s.cell, s.facet, s.recon, assembly_degree(k), opts.threads);
    auto ru = r.apply({&ut, &uf});
    const auto e = error_norms(ru, scalar_function(c.u), scalar_gradient(c.grad), norm_degree(k));
    report.err_l2 = e.l2;
    report.err_h1 = e.h1;
    report.extra["cell_l2"] = error_norms(ut, scalar_function(c.u), scalar_gradient(c.grad), norm_degree(k)).l2;
    report.fields.emplace("u", std::move(ru));
    report.fields.emplace("u_T", std::move(ut));
    report.fields.emplace("u_F", std::move(uf));
    return report;
}

// ---------------------------------------------------------------- elasticity

namespace
{

struct VectorHhoSetup
{
    std::shared_ptr<BrokenSpace> cell, facet;
    std::shared_ptr<BlockSpace> space;
};

VectorHhoSetup vector_hho_setup(const std::shared_ptr<const PolytopalMesh>& mesh, int k)
{
    VectorHhoSetup s;
    s.cell = broken_space(mesh, 2, k + 1, ValueShape::Vector, cell_options());
    s.facet = broken_space(mesh, 1, k, ValueShape::Vector, facet_options(true));
    s.space = std::make_shared<BlockSpace>(std::vector<Field>{Field::cell(s.cell, "u_T"), Field::facet(s.facet, "u_F")},
                                           std::vector<int>{1, 1});
    return s;
}

} // namespace

namespace
{

HybridProblem elasticity_problem(const VectorHhoSetup& s, int k, const ElasticityCase& c)
{
    if (!(c.lambda > 0.0) || !(c.mu > 0.0))
        fail(ErrorCode::InvalidArgument, "Lame parameters must be positive");
    const auto& mesh = s.cell->mesh_ptr();
    auto grad_space = broken_space(mesh, 2, k, ValueShape::SymTensor);
    const auto g = interpolate(s.facet, vector_function(c.u));
    auto f = vector_function(c.f);
    const double lambda = c.lambda;
    const double mu = c.mu;
    PatchForm form = [f, lambda, mu](const PatchContext& ctx, PatchSystem& ps) {
        const Eigen::MatrixXd gr = gradient_reconstruction_local(ctx, 0, 1, 2);
        const auto& of = ctx.fields[2];
        const auto& w = ctx.weights;
        Eigen::MatrixXd law = Eigen::MatrixXd::Zero(of.dim, of.dim);
        for (const auto& v : of.values)
            law += 2.0 * mu * weighted_product(v, w, v);
        const Eigen::MatrixXd tr = of.values[0] + of.values[1];
        law += lambda * weighted_product(tr, w, tr);
        add_hybrid_block(ps, 0, 1, gr.transpose() * law * gr + lehrenfeld_schoeberl(ctx, 0, 1));
        ps.add_vector(0, load_vector(ctx, 0, f));
    };
    return make_problem(cell_patches(mesh), *s.space, {Field::cell(grad_space)}, assembly_degree(k + 1), form,
                        skeleton_vector(*s.space, {{1, g.coefficients()}}));
}

} // namespace

HybridProblem hho_elasticity_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const ElasticityCase& c)
{
    check_degree(k, 0, "elasticity");
    return elasticity_problem(vector_hho_setup(mesh, k), k, c);
}

SolveReport solve_hho_elasticity(std::shared_ptr<const PolytopalMesh> mesh, int k, const ElasticityCase& c,
                                 DriverOptions opts)
{
    const auto t0 = Clock::now();
    auto report = new_report("elasticity", *mesh, k);
    check_degree(k, 0, "elasticity");
    const auto s = vector_hho_setup(mesh, k);
    const auto problem = elasticity_problem(s, k, c);
    const auto sol = run_hybrid(problem, opts, report, t0);
    report.dofs_full = full_dofs(*s.space);
    auto ut = field_function(*s.space, 0, sol);
    auto uf = field_function(*s.space, 1, sol);
    const auto e = error_norms(ut, vector_function(c.u), tensor_gradient(c.grad), norm_degree(k + 1));
    report.err_l2 = e.l2;
    report.err_h1 = e.h1;
    report.fields.emplace("u", std::move(ut));
    report.fields.emplace("u_F", std::move(uf));
    return report;
}

// ---------------------------------------------------------------- Stokes

namespace
{

struct StokesSetup
{
    std::shared_ptr<BrokenSpace> vel_cell, vel_facet, p_fluct, p_mean, recon, div;
    std::shared_ptr<BlockSpace> space;
    int ut = 0, ph = -1, uf = 1, pb = 2, lm = 3;
};

StokesSetup stokes_setup(const std::shared_ptr<const PolytopalMesh>& mesh, int k)
{
    StokesSetup s;
    s.vel_cell = broken_space(mesh, 2, k + 1, ValueShape::Vector, cell_options());
    s.vel_facet = broken_space(mesh, 1, k, ValueShape::Vector, facet_options(true));
    s.p_mean = broken_space(mesh, 2, 0, ValueShape::Scalar, cell_options());
    s.recon = broken_space(mesh, 2, k + 1, ValueShape::Vector);
    s.div = broken_space(mesh, 2, k, ValueShape::Scalar);
    std::vector<Field> fields{Field::cell(s.vel_cell, "u_T")};
    std::vector<int> blocks;
    if (k >= 1)
    {
        SpaceOptions o = cell_options();
        o.zero_mean = true;
        s.p_fluct = broken_space(mesh, 2, k, ValueShape::Scalar, o);
        fields.push_back(Field::cell(s.p_fluct, "p_hat"));
        s.ph = 1;
        s.uf = 2;
        s.pb = 3;
        s.lm = 4;
        blocks = {2, 3};
    }
    else
        blocks = {1, 3};
    fields.push_back(Field::facet(s.vel_facet, "u_F"));
    fields.push_back(Field::cell(s.p_mean, "p_bar"));
    fields.push_back(Field::global("lambda"));
    s.space = std::make_shared<BlockSpace>(std::move(fields), std::move(blocks));
    return s;
}

} // namespace

namespace
{

HybridProblem stokes_problem(const StokesSetup& s, int k, const StokesCase& c)
{
    const auto& mesh = s.vel_cell->mesh_ptr();
    const auto g = interpolate(s.vel_facet, vector_function(c.u));
    auto f = vector_function(c.f);
    const int nf = static_cast<int>(s.space->num_fields());
    const int ir = nf;
    const int id = nf + 1;
    const int ut = s.ut, ph = s.ph, uf = s.uf, pb = s.pb, lm = s.lm;
    PatchForm form = [=](const PatchContext& ctx, PatchSystem& ps) {
        const auto& w = ctx.weights;
        const Eigen::MatrixXd r = elliptic_reconstruction_local(ctx, ut, uf, ir, EllipticRhs::Laplacian);
        add_hybrid_block(ps, ut, uf,
                         r.transpose() * stiffness(ctx.fields[ir], w) * r + lehrenfeld_schoeberl(ctx, ut, uf));
        const Eigen::MatrixXd d = divergence_reconstruction_local(ctx, ut, uf, id);
        const auto& dv = ctx.fields[id].values[0];
        if (ph >= 0)
            add_coupling(ps, ph, ut, uf, -weighted_product(ctx.fields[ph].values[0], w, dv) * d);
        const auto& pv = ctx.fields[pb].values[0];
        add_coupling(ps, pb, ut, uf, -weighted_product(pv, w, dv) * d);
        const Eigen::MatrixXd mean = pv * w;
        ps.add_block(lm, pb, mean.transpose());
        ps.add_block(pb, lm, mean);
        ps.add_vector(ut, load_vector(ctx, ut, f));
    };
    return make_problem(cell_patches(mesh), *s.space, {Field::cell(s.recon), Field::cell(s.div)},
                        assembly_degree(k + 1), form, skeleton_vector(*s.space, {{s.uf, g.coefficients()}}));
}

} // namespace

HybridProblem hho_stokes_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const StokesCase& c)
{
    check_degree(k, 0, "stokes");
    return stokes_problem(stokes_setup(mesh, k), k, c);
}

SolveReport solve_hho_stokes(std::shared_ptr<const PolytopalMesh> mesh, int k, const StokesCase& c,
                             DriverOptions opts)
{
    const auto t0 = Clock::now();
    auto report = new_report("stokes", *mesh, k);
    if (opts.solver.kind != SolverKind::Lu)
    {
        opts.solver.kind = SolverKind::Lu;
        report.notes.push_back("stokes skeleton system is indefinite; sparse LU used instead of cg");
    }
    check_degree(k, 0, "stokes");
    const auto s = stokes_setup(mesh, k);
    const auto problem = stokes_problem(s, k, c);
    const auto sol = run_hybrid(problem, opts, report, t0);
    report.dofs_full = full_dofs(*s.space);
    auto ut = field_function(*s.space, s.ut, sol);
    auto uf = field_function(*s.space, s.uf, sol);
    auto pbar = field_function(*s.space, s.pb, sol);
    const auto e = error_norms(ut, vector_function(c.u), tensor_gradient(c.grad), norm_degree(k + 1));
    report.err_l2 = e.l2;
    report.err_h1 = e.h1;

    // pressure = cellwise mean + zero-mean fluctuation, expressed in a full P^k space
    auto p_space = broken_space(mesh, 2, k, ValueShape::Scalar, cell_options());
    FEFunction ph(p_space);
    std::optional<FEFunction> pfl;
    if (s.ph >= 0)
        pfl = field_function(*s.space, s.ph, sol);
    double mean = 0.0;
    for (int t = 0; t < p_space->num_faces(); ++t)
    {
        const auto q = p_space->quadrature(t, norm_degree(k));
        const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), static_cast<Eigen::Index>(q.size()));
        Eigen::VectorXd pv = pbar.evaluate(2, t, q.points).row(0).transpose();
        if (pfl)
            pv += pfl->evaluate(2, t, q.points).row(0).transpose();
        const auto& b = p_space->basis(t);
        const Eigen::MatrixXd bv = b.values(q.points);
        ph.coefficients().segment(p_space->offset(t), b.dim()) = b.scalar_mass(q).llt().solve(bv * w.cwiseProduct(pv));
        mean += w.dot(pv);
    }
    report.extra["pressure_mean"] = mean;
    report.extra["pressure_l2"] = error_norms(ph, scalar_function(c.p), zero_gradient(1), norm_degree(k)).l2;
    report.fields.emplace("u", std::move(ut));
    report.fields.emplace("u_F", std::move(uf));
    report.fields.emplace("p", std::move(ph));
    return report;
}

// ---------------------------------------------------------------- optimal control

namespace
{

struct ControlSetup
{
    std::shared_ptr<BrokenSpace> cell, facet, recon;
    std::shared_ptr<BlockSpace> space;
};

ControlSetup control_setup(const std::shared_ptr<const PolytopalMesh>& mesh, int k)
{
    ControlSetup s;
    s.cell = broken_space(mesh, 2, k + 1, ValueShape::Scalar, cell_options());
    s.facet = broken_space(mesh, 1, k, ValueShape::Scalar, facet_options(true));
    s.recon = broken_space(mesh, 2, k + 1, ValueShape::Scalar);
    s.space = std::make_shared<BlockSpace>(std::vector<Field>{Field::cell(s.cell, "u_T"), Field::facet(s.facet, "u_F")},
                                           std::vector<int>{1, 1});
    return s;
}

HybridProblem control_problem(const ControlSetup& s, int k, const ScalarField& rhs)
{
    auto f = scalar_function(rhs);
    PatchForm form = [f](const PatchContext& ctx, PatchSystem& ps) {
        const Eigen::MatrixXd r = elliptic_reconstruction_local(ctx, 0, 1, 2, EllipticRhs::Gradient);
        add_hybrid_block(ps, 0, 1,
                         r.transpose() * stiffness(ctx.fields[2], ctx.weights) * r + lehrenfeld_schoeberl(ctx, 0, 1));
        ps.add_vector(0, load_vector(ctx, 0, f));
    };
    return make_problem(cell_patches(s.cell->mesh_ptr()), *s.space, {Field::cell(s.recon)}, assembly_degree(k + 1),
                        form, skeleton_vector(*s.space, {}));
}

/// Cell quadrature data reused by every fixed-point step.
struct CellSamples
{
    std::vector<Point2> points;
    Eigen::VectorXd weights;
    Eigen::MatrixXd basis; // (cell dim x points)
};

} // namespace

HybridProblem hho_control_state_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const ControlCase& c)
{
    check_degree(k, 0, "control", 1);
    return control_problem(control_setup(mesh, k), k, c.f);
}

SolveReport solve_hho_optimal_control(std::shared_ptr<const PolytopalMesh> mesh, int k, const ControlCase& c,
                                      DriverOptions opts, ControlOptions control)
{
    check_degree(k, 0, "control", 1);
    if (!(c.alpha > 0.0) || !(c.za < c.zb))
        fail(ErrorCode::InvalidArgument, "control needs alpha > 0 and z_a < z_b");
    const auto t0 = Clock::now();
    auto report = new_report("control", *mesh, k);
    const auto s = control_setup(mesh, k);
    const auto problem = control_problem(s, k, c.f);
    auto cs = condense(problem, opts.threads);
    report.time_setup = seconds_since(t0);
    const auto t1 = Clock::now();
    report.dofs_full = full_dofs(*s.space);
    report.dofs_condensed = problem.layout->num_free();

    const int nc = static_cast<int>(mesh->num_cells());
    const int qd = norm_degree(k + 1);
    std::vector<CellSamples> samples(nc);
    for (int t = 0; t < nc; ++t)
    {
        auto q = cell_quadrature(mesh->cell(t), qd);
        samples[t].weights = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), static_cast<Eigen::Index>(q.size()));
        samples[t].basis = s.cell->basis(t).values(q.points);
        samples[t].points = std::move(q.points);
    }
    auto sample = [&](int t, const ScalarField& g) {
        Eigen::VectorXd v(samples[t].points.size());
        for (std::size_t i = 0; i < samples[t].points.size(); ++i)
            v(i) = g(samples[t].points[i]);
        return v;
    };
    std::vector<Eigen::VectorXd> f_at(nc), ud_at(nc), z(nc);
    for (int t = 0; t < nc; ++t)
    {
        f_at[t] = sample(t, c.f);
        ud_at[t] = sample(t, c.u_d);
        z[t] = Eigen::VectorXd::Zero(samples[t].points.size());
    }

    SkeletonSolver solver(cs.matrix, opts.solver);
    std::vector<Eigen::VectorXd> b_b(nc);
    for (int t = 0; t < nc; ++t)
        b_b[t] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.layout->skeleton_ids(t).size()));
    // patch p holds cell p, so interior ids of patch p are the DOFs of cell p
    auto solve_with = [&](const std::vector<Eigen::VectorXd>& load) {
        std::vector<Eigen::VectorXd> b_i(nc);
        for (int t = 0; t < nc; ++t)
            b_i[t] = samples[t].basis * samples[t].weights.cwiseProduct(load[t]);
        recondense_rhs(cs, b_i, b_b);
        const Eigen::VectorXd skel = expand_skeleton(cs, solver.solve(cs.rhs));
        HybridSolution sol;
        sol.interior = back_substitute(cs, skel);
        sol.skeleton = skel;
        sol.stats = solver.stats();
        return sol;
    };

    HybridSolution state, adjoint;
    std::vector<Eigen::VectorXd> load(nc);
    int it = 0;
    double diff = 0.0;
    for (;;)
    {
        for (int t = 0; t < nc; ++t)
            load[t] = f_at[t] + z[t];
        state = solve_with(load);
        for (int t = 0; t < nc; ++t)
        {
            const Eigen::VectorXd u = samples[t].basis.transpose() * state.interior.segment(s.cell->offset(t), s.cell->face_dim(t));
            load[t] = u - ud_at[t];
        }
        adjoint = solve_with(load);
        ++it;
        double d2 = 0.0;
        for (int t = 0; t < nc; ++t)
        {
            const Eigen::VectorXd p = samples[t].basis.transpose() * adjoint.interior.segment(s.cell->offset(t), s.cell->face_dim(t));
            Eigen::VectorXd zn(p.size());
            for (Eigen::Index i = 0; i < p.size(); ++i)
                zn(i) = clamp_control(-p(i) / c.alpha, c.za, c.zb);
            d2 += samples[t].weights.dot((zn - z[t]).cwiseAbs2());
            z[t] = std::move(zn);
        }
        diff = std::sqrt(d2);
        if (diff < control.tol)
            break;
        if (it >= control.maxit)
            throw NotConverged(it, diff, "optimal control fixed point");
    }
    // state and adjoint belong to the control before the last update; refresh them
    for (int t = 0; t < nc; ++t)
        load[t] = f_at[t] + z[t];
    state = solve_with(load);
    for (int t = 0; t < nc; ++t)
    {
        const Eigen::VectorXd u = samples[t].basis.transpose() * state.interior.segment(s.cell->offset(t), s.cell->face_dim(t));
        load[t] = u - ud_at[t];
    }
    adjoint = solve_with(load);
    report.time_solve = seconds_since(t1);
    report.stats = state.stats;

    FEFunction uh(s.cell, state.interior);
    FEFunction ph(s.cell, adjoint.interior);
    const auto eu = error_norms(uh, scalar_function(c.u), scalar_gradient(c.grad_u), qd);
    report.err_l2 = eu.l2;
    report.err_h1 = eu.h1;
    const auto ep = error_norms(ph, scalar_function(c.p), scalar_gradient(c.grad_p), qd);
    report.extra["p_l2"] = ep.l2;
    report.extra["p_h1"] = ep.h1;
    double z2 = 0.0;
    FEFunction zh(s.cell);
    for (int t = 0; t < nc; ++t)
    {
        const Eigen::VectorXd exact = sample(t, c.z);
        z2 += samples[t].weights.dot((z[t] - exact).cwiseAbs2());
        const Eigen::MatrixXd& bv = samples[t].basis;
        const Eigen::MatrixXd mass = weighted_product(bv, samples[t].weights, bv);
        zh.coefficients().segment(s.cell->offset(t), s.cell->face_dim(t))
            = mass.llt().solve(bv * samples[t].weights.cwiseProduct(z[t]));
    }
    report.extra["z_l2"] = std::sqrt(z2);
    report.extra["iterations"] = it;
    report.extra["fixed_point_increment"] = diff;
    report.fields.emplace("u", std::move(uh));
    report.fields.emplace("p", std::move(ph));
    report.fields.emplace("z", std::move(zh));
    return report;
}

// ---------------------------------------------------------------- dispatch

const std::vector<std::string>& method_names()
{
    static const std::vector<std::string> names{"dg", "hdg", "hho", "elasticity", "stokes", "control"};
    return names;
}

std::string default_case(const std::string& method)
{
    if (method == "dg" || method == "hdg" || method == "hho" || method == "elasticity")
        return "sine";
    if (method == "stokes")
        return "smooth";
    if (method == "control")
        return "constructed";
    fail(ErrorCode::InvalidArgument, "unknown method '" + method + "'");
}

namespace
{
std::string case_of(const std::string& method, const RunParameters& p)
{
    return p.case_name.empty() ? default_case(method) : p.case_name;
}
} // namespace

SolveReport run_method(const std::string& method, std::shared_ptr<const PolytopalMesh> mesh, int k,
                       const RunParameters& params)
{
    const auto name = case_of(method, params);
    SolveReport r;
    if (method == "dg")
    {
        const bool use_default = !(params.gamma > 0.0);
        const double gamma = use_default ? default_dg_penalty(k) : params.gamma;
        r = solve_dg_poisson(std::move(mesh), k, gamma, poisson_case(name), params.driver);
        if (use_default)
        {
            char buf[96];
            std::snprintf(buf, sizeof buf, "default penalty gamma = %g applied", gamma);
            r.notes.emplace_back(buf);
        }
    }
    else if (method == "hdg")
        r = solve_hdg_poisson(std::move(mesh), k, params.tau, poisson_case(name), params.driver);
    else if (method == "hho")
        r = solve_hho_poisson(std::move(mesh), k, poisson_case(name), params.driver);
    else if (method == "elasticity")
        r = solve_hho_elasticity(std::move(mesh), k, elasticity_case(name, params.lambda, params.mu), params.driver);
    else if (method == "stokes")
        r = solve_hho_stokes(std::move(mesh), k, stokes_case(name), params.driver);
    else if (method == "control")
        r = solve_hho_optimal_control(std::move(mesh), k,
                                      control_case(name, params.alpha, params.za, params.zb), params.driver,
                                      params.control);
    else
        fail(ErrorCode::InvalidArgument, "unknown method '" + method + "'");
    return r;
}

HybridProblem hybrid_problem(const std::string& method, std::shared_ptr<const PolytopalMesh> mesh, int k,
                             const RunParameters& params)
{
    const auto name = case_of(method, params);
    if (method == "hdg")
        return hdg_poisson_problem(std::move(mesh), k, params.tau, poisson_case(name));
    if (method == "hho")
        return hho_poisson_problem(std::move(mesh), k, poisson_case(name));
    if (method == "elasticity")
        return hho_elasticity_problem(std::move(mesh), k, elasticity_case(name, params.lambda, params.mu));
    if (method == "stokes")
        return hho_stokes_problem(std::move(mesh), k, stokes_case(name));
    if (method == "control")
        return hho_control_state_problem(std::move(mesh), k,
                                         control_case(name, params.alpha, params.za, params.zb));
    fail(ErrorCode::InvalidArgument, "'" + method + "' is not a hybrid method");
}

double eoc(double e1, double e2, double h1, double h2)
{
    if (!(e1 >= eoc_precision_floor) || !(e2 >= eoc_precision_floor) || h1 == h2)
        return std::numeric_limits<double>::quiet_NaN();
    return std::log(e1 / e2) / std::log(h1 / h2);
}

std::vector<ConvergenceRow> convergence_study(const std::function<SolveReport(int)>& solve, const std::vector<int>& ns)
{
    std::vector<ConvergenceRow> rows;
    for (int n : ns)
    {
        const auto r = solve(n);
        ConvergenceRow row;
        row.method = r.method;
        row.k = r.k;
        row.n = n;
        row.h = r.h;
        row.dofs_full = r.dofs_full;
        row.dofs_condensed = r.dofs_condensed;
        row.err_l2 = r.err_l2;
        row.err_h1 = r.err_h1;
        row.extra = r.extra;
        if (!rows.empty())
        {
            const auto& prev = rows.back();
            row.eoc_l2 = eoc(prev.err_l2, row.err_l2, prev.h, row.h);
            row.eoc_h1 = eoc(prev.err_h1, row.err_h1, prev.h, row.h);
            for (const auto& [key, value] : row.extra)
            {
                auto it = prev.extra.find(key);
                if (it != prev.extra.end() && (key.ends_with("_l2") || key.ends_with("_h1")))
                    row.eoc_extra[key] = eoc(it->second, value, prev.h, row.h);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ConvergenceRow> convergence_study(const std::string& method, int k, const std::vector<int>& ns,
                                              const RunParameters& params)
{
    if (ns.size() < 2)
        fail(ErrorCode::InvalidArgument, "a convergence study needs at least two resolutions");
    return convergence_study(
        [&](int n) {
            auto mesh = std::make_shared<const PolytopalMesh>(voronoi_mesh(n));
            auto r = run_method(method, mesh, k, params);
            r.n = n;
            return r;
        },
        ns);
}

} // namespace polyhybrid
