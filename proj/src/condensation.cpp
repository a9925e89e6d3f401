#include "polyhybrid/condensation.hpp"

#include "polyhybrid/error.hpp"
#include "polyhybrid/parallel.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <map>

namespace polyhybrid
{

namespace
{

void local_positions(const PatchSystem& ps, const std::vector<int>& field_block, std::vector<int>& interior,
                     std::vector<int>& skeleton)
{
    if (ps.num_row_fields() != field_block.size() || ps.num_col_fields() != field_block.size()
        || ps.row_offsets != ps.col_offsets)
        fail(ErrorCode::BadPartition, "partition does not match the patch system fields");
    interior.clear();
    skeleton.clear();
    for (std::size_t f = 0; f < field_block.size(); ++f)
    {
        if (field_block[f] != 0 && field_block[f] != 1)
            fail(ErrorCode::BadPartition, "fields belong to block 0 or block 1");
        auto& target = field_block[f] == 0 ? interior : skeleton;
        for (int i = ps.row_offsets[f]; i < ps.row_offsets[f + 1]; ++i)
            target.push_back(i);
    }
}

Eigen::MatrixXd pick(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols)
{
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = m(rows[i], cols[j]);
    return out;
}

Eigen::VectorXd pick(const Eigen::VectorXd& v, const std::vector<int>& rows)
{
    Eigen::VectorXd out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out(i) = v(rows[i]);
    return out;
}

} // namespace

BlockSplit split_blocks(const PatchSystem& ps, const std::vector<int>& field_block)
{
    std::vector<int> in;
    std::vector<int> sk;
    local_positions(ps, field_block, in, sk);
    BlockSplit s;
    s.k_ii = pick(ps.matrix, in, in);
    s.k_ib = pick(ps.matrix, in, sk);
    s.k_bi = pick(ps.matrix, sk, in);
    s.k_bb = pick(ps.matrix, sk, sk);
    s.b_i = pick(ps.vector, in);
    s.b_b = pick(ps.vector, sk);
    return s;
}

CondensationLayout::CondensationLayout(const BlockSpace& space, const PatchTopology& topo)
{
    if (space.num_blocks() > 2)
        fail(ErrorCode::BadPartition, "condensation uses at most two blocks");
    const std::size_t nf = space.num_fields();
    std::vector<Table> maps;
    for (std::size_t f = 0; f < nf; ++f)
    {
        field_block_.push_back(space.block_of(f));
        maps.push_back(patch_dof_map(space.field(f), topo));
    }
    interior_dim_ = space.block_dim(0);
    skeleton_dim_ = space.num_blocks() > 1 ? space.block_dim(1) : 0;

    free_index_.assign(skeleton_dim_, -1);
    for (std::size_t f = 0; f < nf; ++f)
    {
        if (field_block_[f] != 1)
            continue;
        const auto& field = space.field(f);
        for (int d = 0; d < field.dim(); ++d)
            if (!field.is_dirichlet(d))
                free_index_[space.field_offset(f) + d] = 0;
    }
    for (int& i : free_index_)
        if (i == 0)
            i = num_free_++;

    const std::size_t np = topo.num_patches();
    interior_.resize(np);
    skeleton_.resize(np);
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t f = 0; f < nf; ++f)
        {
            auto& target = field_block_[f] == 0 ? interior_[p] : skeleton_[p];
            for (int id : maps[f][p])
                target.push_back(space.field_offset(f) + id);
        }
}

namespace
{

struct PatchCondensation
{
    Eigen::MatrixXd k_red;
    Eigen::VectorXd b_red;
};

void scatter_rhs(const CondensedSystem& cs, std::size_t p, const Eigen::VectorXd& b_red, Eigen::VectorXd& rhs)
{
    const auto& ids = cs.layout->skeleton_ids(p);
    for (std::size_t r = 0; r < ids.size(); ++r)
    {
        const int fr = cs.layout->free_index(ids[r]);
        if (fr >= 0)
            rhs(fr) += b_red(r);
    }
}

} // namespace

CondensedSystem condense(const HybridProblem& problem, int threads)
{
    CondensedSystem cs;
    cs.layout = problem.layout;
    const auto& layout = *problem.layout;
    const int np = static_cast<int>(layout.num_patches());
    cs.factors.resize(np);
    cs.k_ib.resize(np);
    cs.k_bi.resize(np);
    cs.b_i.resize(np);
    std::vector<PatchCondensation> reduced(np);

    parallel_for(np, threads, [&](int, int begin, int end) {
        auto source = problem.make_source();
        PatchSystem ps;
        for (int p = begin; p < end; ++p)
        {
            source(p, ps);
            auto s = split_blocks(ps, layout.field_block());
            if (s.k_ii.rows() > 0)
            {
                cs.factors[p].compute(s.k_ii);
                const double rc = cs.factors[p].rcond();
                if (!(rc > 1e-14))
                    throw SingularInterior(p);
                const Eigen::MatrixXd x = cs.factors[p].solve(s.k_ib);
                const Eigen::VectorXd y = cs.factors[p].solve(s.b_i);
                reduced[p].k_red = s.k_bb - s.k_bi * x;
                reduced[p].b_red = s.b_b - s.k_bi * y;
            }
            else
            {
                reduced[p].k_red = s.k_bb;
                reduced[p].b_red = s.b_b;
            }
            cs.k_ib[p] = std::move(s.k_ib);
            cs.k_bi[p] = std::move(s.k_bi);
            cs.b_i[p] = std::move(s.b_i);
        }
    });

    std::vector<Eigen::Triplet<double>> inner;
    std::vector<Eigen::Triplet<double>> coupling;
    cs.rhs = Eigen::VectorXd::Zero(layout.num_free());
    for (int p = 0; p < np; ++p)
    {
        const auto& ids = layout.skeleton_ids(p);
        const auto& k = reduced[p].k_red;
        for (std::size_t r = 0; r < ids.size(); ++r)
        {
            const int fr = layout.free_index(ids[r]);
            if (fr < 0)
                continue;
            for (std::size_t c = 0; c < ids.size(); ++c)
            {
                const int fc = layout.free_index(ids[c]);
                if (fc >= 0)
                    inner.emplace_back(fr, fc, k(r, c));
                else
                    coupling.emplace_back(fr, ids[c], k(r, c));
            }
        }
        scatter_rhs(cs, p, reduced[p].b_red, cs.rhs);
    }
    cs.matrix.resize(layout.num_free(), layout.num_free());
    cs.matrix.setFromTriplets(inner.begin(), inner.end());
    cs.dirichlet_coupling.resize(layout.num_free(), layout.skeleton_dim());
    cs.dirichlet_coupling.setFromTriplets(coupling.begin(), coupling.end());
    cs.skeleton_values = problem.skeleton_values.size() == layout.skeleton_dim()
                           ? problem.skeleton_values
                           : Eigen::VectorXd::Zero(layout.skeleton_dim());
    cs.rhs -= cs.dirichlet_coupling * cs.skeleton_values;
    return cs;
}

void recondense_rhs(CondensedSystem& cs, const std::vector<Eigen::VectorXd>& b_i,
                    const std::vector<Eigen::VectorXd>& b_b)
{
    const auto& layout = *cs.layout;
    const std::size_t np = layout.num_patches();
    if (b_i.size() != np || b_b.size() != np)
        fail(ErrorCode::LayoutMismatch, "one interior and one skeleton vector per patch expected");
    cs.rhs = Eigen::VectorXd::Zero(layout.num_free());
    for (std::size_t p = 0; p < np; ++p)
    {
        if (b_i[p].size() != static_cast<Eigen::Index>(layout.interior_ids(p).size())
            || b_b[p].size() != static_cast<Eigen::Index>(layout.skeleton_ids(p).size()))
            fail(ErrorCode::LayoutMismatch, "patch vector length mismatch");
        cs.b_i[p] = b_i[p];
        Eigen::VectorXd b_red = b_b[p];
        if (b_i[p].size() > 0)
            b_red -= cs.k_bi[p] * cs.factors[p].solve(b_i[p]);
        scatter_rhs(cs, p, b_red, cs.rhs);
    }
    cs.rhs -= cs.dirichlet_coupling * cs.skeleton_values;
}

Eigen::VectorXd expand_skeleton(const CondensedSystem& cs, const Eigen::VectorXd& free_values)
{
    const auto& layout = *cs.layout;
    Eigen::VectorXd out = cs.skeleton_values;
    for (int i = 0; i < layout.skeleton_dim(); ++i)
    {
        const int f = layout.free_index(i);
        if (f >= 0)
            out(i) = free_values(f);
    }
    return out;
}

Eigen::VectorXd back_substitute(const CondensedSystem& cs, const Eigen::VectorXd& skeleton)
{
    const auto& layout = *cs.layout;
    Eigen::VectorXd interior = Eigen::VectorXd::Zero(layout.interior_dim());
    for (std::size_t p = 0; p < layout.num_patches(); ++p)
    {
        const auto& in = layout.interior_ids(p);
        if (in.empty())
            continue;
        const auto& sk = layout.skeleton_ids(p);
        Eigen::VectorXd ub(sk.size());
        for (std::size_t i = 0; i < sk.size(); ++i)
            ub(i) = skeleton(sk[i]);
        Eigen::VectorXd r = cs.b_i[p];
        if (ub.size() > 0)
            r -= cs.k_ib[p] * ub;
        const Eigen::VectorXd ui = cs.factors[p].solve(r);
        for (std::size_t i = 0; i < in.size(); ++i)
            interior(in[i]) = ui(i);
    }
    return interior;
}

SolverKind parse_solver(const std::string& name)
{
    if (name == "cg")
        return SolverKind::Cg;
    if (name == "lu" || name == "dense_lu")
        return SolverKind::Lu;
    fail(ErrorCode::InvalidArgument, "unknown solver '" + name + "'");
}

Eigen::VectorXd conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, double tol, int maxit,
                                   SolveStats* stats)
{
    const Eigen::Index n = b.size();
    if (maxit < 0)
        maxit = static_cast<int>(std::max<Eigen::Index>(10 * n, 10));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    SolveStats local;
    if (bnorm == 0.0)
    {
        if (stats)
            *stats = local;
        return x;
    }
    const Eigen::VectorXd diag = a.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(diag(i) > 0.0))
            fail(ErrorCode::IndefiniteDetected, "nonpositive diagonal entry in row " + std::to_string(i));
    const Eigen::VectorXd inv_diag = diag.cwiseInverse();

    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    Eigen::VectorXd ap(n);
    for (int it = 1; it <= maxit; ++it)
    {
        ap.noalias() = a * p;
        const double pap = p.dot(ap);
        if (!(pap > 0.0))
            fail(ErrorCode::IndefiniteDetected, "conjugate gradients met a direction of nonpositive curvature");
        const double alpha = rz / pap;
        x += alpha * p;
        r -= alpha * ap;
        local.iterations = it;
        local.residual = r.norm() / bnorm;
        if (local.residual <= tol)
        {
            if (stats)
                *stats = local;
            return x;
        }
        z = inv_diag.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw NotConverged(local.iterations, local.residual, "conjugate gradients");
}

struct SkeletonSolver::Lu
{
    Eigen::SparseMatrix<double> colmajor;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

SkeletonSolver::SkeletonSolver(const SparseMatrix& matrix, SolverOptions options)
  : matrix_(matrix), options_(options)
{
    if (options_.kind == SolverKind::Lu && matrix_.rows() > 0)
    {
        lu_ = std::make_unique<Lu>();
        lu_->colmajor = matrix_;
        lu_->colmajor.makeCompressed();
        lu_->lu.compute(lu_->colmajor);
        if (lu_->lu.info() != Eigen::Success)
            fail(ErrorCode::SingularSaddle, "sparse LU factorisation of the skeleton matrix failed");
    }
}

SkeletonSolver::~SkeletonSolver() = default;

Eigen::VectorXd SkeletonSolver::solve(const Eigen::VectorXd& rhs)
{
    if (matrix_.rows() == 0)
        return Eigen::VectorXd();
    if (options_.kind == SolverKind::Cg)
        return conjugate_gradient(matrix_, rhs, options_.tol, options_.maxit, &stats_);
    Eigen::VectorXd x = lu_->lu.solve(rhs);
    stats_.iterations = 1;
    const double bn = rhs.norm();
    stats_.residual = bn > 0.0 ? (matrix_ * x - rhs).norm() / bn : 0.0;
    return x;
}

Eigen::VectorXd solve_condensed(const CondensedSystem& cs, SolverOptions options, SolveStats* stats)
{
    SkeletonSolver solver(cs.matrix, options);
    Eigen::VectorXd x = solver.solve(cs.rhs);
    if (stats)
        *stats = solver.stats();
    return x;
}

HybridSolution solve_hybrid(const HybridProblem& problem, SolverOptions options, int threads)
{
    const auto cs = condense(problem, threads);
    HybridSolution sol;
    const Eigen::VectorXd free = solve_condensed(cs, options, &sol.stats);
    sol.skeleton = expand_skeleton(cs, free);
    sol.interior = back_substitute(cs, sol.skeleton);
    return sol;
}

MonolithicSystem assemble_monolithic(const HybridProblem& problem)
{
    const auto& layout = *problem.layout;
    const int ni = layout.interior_dim();
    const int n = ni + layout.num_free();
    Eigen::VectorXd g = problem.skeleton_values.size() == layout.skeleton_dim()
                          ? problem.skeleton_values
                          : Eigen::VectorXd::Zero(layout.skeleton_dim());
    MonolithicSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    auto source = problem.make_source();
    PatchSystem ps;
    std::vector<int> in;
    std::vector<int> sk;
    for (std::size_t p = 0; p < layout.num_patches(); ++p)
    {
        source(static_cast<int>(p), ps);
        local_positions(ps, layout.field_block(), in, sk);
        // local position -> monolithic index, or -(1 + skeleton id) for Dirichlet DOFs
        std::vector<std::pair<int, int>> map;
        const auto& iid = layout.interior_ids(p);
        const auto& sid = layout.skeleton_ids(p);
        for (std::size_t i = 0; i < in.size(); ++i)
            map.emplace_back(in[i], iid[i]);
        for (std::size_t i = 0; i < sk.size(); ++i)
        {
            const int f = layout.free_index(sid[i]);
            map.emplace_back(sk[i], f >= 0 ? ni + f : -(1 + sid[i]));
        }
        for (const auto& [lr, gr] : map)
        {
            if (gr < 0)
                continue;
            sys.rhs(gr) += ps.vector(lr);
            for (const auto& [lc, gc] : map)
            {
                if (gc >= 0)
                    trip.emplace_back(gr, gc, ps.matrix(lr, lc));
                else
                    sys.rhs(gr) -= ps.matrix(lr, lc) * g(-gc - 1);
            }
        }
    }
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

Eigen::VectorXd solve_monolithic_dense(const MonolithicSystem& system)
{
    const Eigen::MatrixXd dense(system.matrix);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
    if (!lu.isInvertible())
        fail(ErrorCode::SingularSaddle, "monolithic system is singular");
    return lu.solve(system.rhs);
}

Eigen::VectorXd monolithic_vector(const CondensationLayout& layout, const Eigen::VectorXd& interior,
                                  const Eigen::VectorXd& skeleton)
{
    Eigen::VectorXd x(layout.interior_dim() + layout.num_free());
    x.head(layout.interior_dim()) = interior;
    for (int i = 0; i < layout.skeleton_dim(); ++i)
    {
        const int f = layout.free_index(i);
        if (f >= 0)
            x(layout.interior_dim() + f) = skeleton(i);
    }
    return x;
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double bn = b.norm();
    const double rn = (a * x - b).norm();
    return bn > 0.0 ? rn / bn : rn;
}

std::vector<DofRef> patch_dofs(const PatchSystem& ps)
{
    std::vector<DofRef> out;
    for (std::size_t f = 0; f < ps.row_ids.size(); ++f)
        for (int id : ps.row_ids[f])
            out.push_back({static_cast<int>(f), id});
    return out;
}

void merge_mixed_blocks(std::span<const MixedContribution> contributions, PatchSystem& ps)
{
    auto index = [](const std::vector<std::vector<int>>& ids, const std::vector<int>& offsets) {
        std::map<std::pair<int, int>, int> m;
        for (std::size_t f = 0; f < ids.size(); ++f)
            for (std::size_t i = 0; i < ids[f].size(); ++i)
                m[{static_cast<int>(f), ids[f][i]}] = offsets[f] + static_cast<int>(i);
        return m;
    };
    const auto rows = index(ps.row_ids, ps.row_offsets);
    const auto cols = index(ps.col_ids, ps.col_offsets);
    auto lookup = [](const std::map<std::pair<int, int>, int>& m, const DofRef& r) {
        auto it = m.find({r.field, r.dof});
        if (it == m.end())
            fail(ErrorCode::DofMapMismatch, "DOF " + std::to_string(r.dof) + " of field " + std::to_string(r.field)
                                                + " is not part of the patch");
        return it->second;
    };
    for (const auto& c : contributions)
    {
        if (c.matrix.size() > 0
            && (c.matrix.rows() != static_cast<Eigen::Index>(c.rows.size())
                || c.matrix.cols() != static_cast<Eigen::Index>(c.cols.size())))
            fail(ErrorCode::DofMapMismatch, "contribution matrix does not match its DOF lists");
        if (c.vector.size() > 0 && c.vector.size() != static_cast<Eigen::Index>(c.rows.size()))
            fail(ErrorCode::DofMapMismatch, "contribution vector does not match its DOF list");
        std::vector<int> r(c.rows.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = lookup(rows, c.rows[i]);
        if (c.matrix.size() > 0)
        {
            std::vector<int> cc(c.cols.size());
            for (std::size_t j = 0; j < cc.size(); ++j)
                cc[j] = lookup(cols, c.cols[j]);
            for (std::size_t i = 0; i < r.size(); ++i)
                for (std::size_t j = 0; j < cc.size(); ++j)
                    ps.matrix(r[i], cc[j]) += c.matrix(i, j);
        }
        if (c.vector.size() > 0)
            for (std::size_t i = 0; i < r.size(); ++i)
                ps.vector(r[i]) += c.vector(i);
    }
}

} // namespace polyhybrid
