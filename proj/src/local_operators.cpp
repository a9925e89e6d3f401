#include "polyhybrid/local_operators.hpp"

#include "polyhybrid/error.hpp"
#include "polyhybrid/parallel.hpp"

#include <cmath>

namespace polyhybrid
{

namespace
{
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
} // namespace

LocalOperator::LocalOperator(std::vector<Field> inputs, std::shared_ptr<const BrokenSpace> output,
                             std::vector<Eigen::MatrixXd> matrices)
  : inputs_(std::move(inputs)), output_(std::move(output)), matrices_(std::move(matrices))
{
    for (const auto& f : inputs_)
        if (f.kind == FieldKind::Global)
            fail(ErrorCode::LayoutMismatch, "local operators take cell or facet inputs");
}

Eigen::VectorXd LocalOperator::gather(int face, const std::vector<const FEFunction*>& in) const
{
    if (in.size() != inputs_.size())
        fail(ErrorCode::LayoutMismatch, "expected " + std::to_string(inputs_.size()) + " input functions");
    const auto& mesh = output_->mesh();
    std::vector<Eigen::VectorXd> parts;
    Eigen::Index total = 0;
    for (std::size_t i = 0; i < in.size(); ++i)
    {
        const auto& expected = *inputs_[i].space;
        const auto& got = in[i]->space();
        if (&got.mesh() != &expected.mesh() || got.slice_dim() != expected.slice_dim() || got.dim() != expected.dim()
            || got.degree() != expected.degree() || got.shape() != expected.shape())
            fail(ErrorCode::LayoutMismatch, "input function " + std::to_string(i) + " does not match the operator layout");
        if (output_->slice_dim() == 1 || inputs_[i].kind == FieldKind::Cell)
            parts.push_back(in[i]->face_coefficients(face));
        else
        {
            auto facets = mesh.get_faces(2, 1)[face];
            Eigen::Index n = 0;
            for (int f : facets)
                n += got.face_dim(f);
            Eigen::VectorXd v(n);
            n = 0;
            for (int f : facets)
            {
                v.segment(n, got.face_dim(f)) = in[i]->face_coefficients(f);
                n += got.face_dim(f);
            }
            parts.push_back(std::move(v));
        }
        total += parts.back().size();
    }
    Eigen::VectorXd out(total);
    Eigen::Index off = 0;
    for (const auto& p : parts)
    {
        out.segment(off, p.size()) = p;
        off += p.size();
    }
    return out;
}

Eigen::VectorXd LocalOperator::apply(int face, const std::vector<const FEFunction*>& in) const
{
    const Eigen::VectorXd x = gather(face, in);
    if (x.size() != matrices_[face].cols())
        fail(ErrorCode::LayoutMismatch, "gathered input has the wrong length");
    return matrices_[face] * x;
}

FEFunction LocalOperator::apply(const std::vector<const FEFunction*>& in) const
{
    FEFunction out(output_);
    for (int f = 0; f < output_->num_faces(); ++f)
        out.coefficients().segment(output_->offset(f), output_->face_dim(f)) = apply(f, in);
    return out;
}

LocalOperator build_local_operator(std::shared_ptr<const PatchTopology> topo, std::vector<Field> inputs,
                                   std::shared_ptr<const BrokenSpace> output, const LocalRecipe& recipe,
                                   int quad_degree, int threads)
{
    auto fields = inputs;
    fields.push_back(Field::cell(output));
    const int n = static_cast<int>(topo->num_patches());
    std::vector<Eigen::MatrixXd> mats(n);
    parallel_for(n, threads, [&](int, int begin, int end) {
        PatchAssembler assembler(topo, fields, quad_degree);
        for (int p = begin; p < end; ++p)
        {
            const auto& ctx = assembler.context(p);
            mats[ctx.cell] = recipe(ctx);
        }
    });
    return LocalOperator(std::move(inputs), std::move(output), std::move(mats));
}

Eigen::MatrixXd constrained_local_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& rhs,
                                        const Eigen::MatrixXd& constraint_rhs)
{
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.rows();
    if (a.cols() != n || (m > 0 && b.cols() != n) || rhs.rows() != n || constraint_rhs.rows() != m
        || (m > 0 && constraint_rhs.cols() != rhs.cols()))
        fail(ErrorCode::BlockShapeMismatch, "inconsistent saddle-point block shapes");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
    k.topLeftCorner(n, n) = a;
    if (m > 0)
    {
        k.topRightCorner(n, m) = b.transpose();
        k.bottomLeftCorner(m, n) = b;
    }
    Eigen::MatrixXd r(n + m, rhs.cols());
    r.topRows(n) = rhs;
    if (m > 0)
        r.bottomRows(m) = constraint_rhs;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible())
        fail(ErrorCode::SingularSaddle, "local saddle-point system is singular");
    return lu.solve(r).topRows(n);
}

Eigen::MatrixXd l2_projection_matrix(const PolyBasis& target, const PolyBasis& source, const QuadratureRule& q,
                                     bool orthonormal_shortcut)
{
    if (target.components() != source.components())
        fail(ErrorCode::LayoutMismatch, "projection between bases with different value shapes");
    const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), static_cast<Eigen::Index>(q.size()));
    const Eigen::MatrixXd t = target.values(q.points);
    const Eigen::MatrixXd s = source.values(q.points);
    const Eigen::MatrixXd b = weighted_product(t, w, s);
    Eigen::MatrixXd cs;
    if (orthonormal_shortcut)
        cs = b;
    else
    {
        Eigen::LLT<Eigen::MatrixXd> llt(weighted_product(t, w, t));
        if (llt.info() != Eigen::Success)
            fail(ErrorCode::SingularMass, "target mass matrix is singular");
        cs = llt.solve(b);
    }
    const int nc = target.components();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(cs.rows() * nc, cs.cols() * nc);
    for (int k = 0; k < nc; ++k)
        c.block(k * cs.rows(), k * cs.cols(), cs.rows(), cs.cols()) = cs;
    return c;
}

LocalOperator l2_projector(std::shared_ptr<const BrokenSpace> target, std::shared_ptr<const BrokenSpace> source,
                           bool orthonormal_shortcut)
{
    if (target->slice_dim() != source->slice_dim() || &target->mesh() != &source->mesh())
        fail(ErrorCode::LayoutMismatch, "projection needs spaces on the same slice of the same mesh");
    const int degree = std::max(target->quad_degree(), source->quad_degree());
    std::vector<Eigen::MatrixXd> mats(target->num_faces());
    for (int f = 0; f < target->num_faces(); ++f)
        mats[f] = l2_projection_matrix(target->basis(f), source->basis(f), target->quadrature(f, degree),
                                       orthonormal_shortcut);
    Field input = source->slice_dim() == 2 ? Field::cell(source) : Field::facet(source);
    return LocalOperator({input}, std::move(target), std::move(mats));
}

namespace
{

struct InputLayout
{
    int cell_cols;
    int facet_cols;
    int total;
};

InputLayout input_layout(const PatchContext& ctx, int cell_field, int facet_field)
{
    const int c = ctx.fields[cell_field].dim;
    const int f = ctx.fields[facet_field].dim;
    return {c, f, c + f};
}

} // namespace

std::array<Eigen::MatrixXd, 3> sym_gradient(const FieldEval& field)
{
    return {field.grads[0][0], field.grads[1][1], inv_sqrt2 * (field.grads[0][1] + field.grads[1][0])};
}

std::array<Eigen::MatrixXd, 3> sym_gradient_trace(const FieldEval& field, std::size_t l)
{
    const auto& g = field.trace_grads[l];
    return {g[0][0], g[1][1], inv_sqrt2 * (g[0][1] + g[1][0])};
}

Eigen::MatrixXd elliptic_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field,
                                              int out_field, EllipticRhs form)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const auto& of = ctx.fields[out_field];
    const int nc = static_cast<int>(of.values.size());
    if (static_cast<int>(cf.values.size()) != nc)
        fail(ErrorCode::LayoutMismatch, "reconstruction output and cell input have different value shapes");
    const auto layout = input_layout(ctx, cell_field, facet_field);
    const int m = of.dim;
    const auto& w = ctx.weights;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd b(nc, m);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, layout.total);
    Eigen::MatrixXd crhs = Eigen::MatrixXd::Zero(nc, layout.total);
    for (int c = 0; c < nc; ++c)
    {
        for (int d = 0; d < 2; ++d)
            a += weighted_product(of.grads[c][d], w, of.grads[c][d]);
        b.row(c) = (of.values[c] * w).transpose();
        crhs.block(c, 0, 1, layout.cell_cols) = (cf.values[c] * w).transpose();
        if (form == EllipticRhs::Gradient)
            for (int d = 0; d < 2; ++d)
                rhs.leftCols(layout.cell_cols) += weighted_product(of.grads[c][d], w, cf.grads[c][d]);
        else
            rhs.leftCols(layout.cell_cols) -= weighted_product(of.laplacians[c], w, cf.values[c]);
    }
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pf = ctx.facets[l];
        for (int c = 0; c < nc; ++c)
        {
            const Eigen::MatrixXd dn = pf.normal.x() * of.trace_grads[l][c][0] + pf.normal.y() * of.trace_grads[l][c][1];
            if (form == EllipticRhs::Gradient)
                rhs.leftCols(layout.cell_cols) -= weighted_product(dn, pf.weights, cf.trace[l][c]);
            rhs.middleCols(layout.cell_cols + ff.facet_offset[l], ff.facet_dim[l])
                += weighted_product(dn, pf.weights, ff.facet_values[l][c]);
        }
    }
    return constrained_local_solve(a, b, rhs, crhs);
}

Eigen::MatrixXd sym_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field, int out_field)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const auto& of = ctx.fields[out_field];
    if (of.values.size() != 2 || cf.values.size() != 2)
        fail(ErrorCode::LayoutMismatch, "symmetric reconstruction needs vector fields");
    const auto layout = input_layout(ctx, cell_field, facet_field);
    const int m = of.dim;
    const auto& w = ctx.weights;
    const auto so = sym_gradient(of);
    const auto sc = sym_gradient(cf);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, layout.total);
    for (int i = 0; i < 3; ++i)
    {
        a += weighted_product(so[i], w, so[i]);
        rhs.leftCols(layout.cell_cols) += weighted_product(so[i], w, sc[i]);
    }
    Eigen::MatrixXd b(3, m);
    Eigen::MatrixXd crhs = Eigen::MatrixXd::Zero(3, layout.total);
    for (int c = 0; c < 2; ++c)
    {
        b.row(c) = (of.values[c] * w).transpose();
        crhs.block(c, 0, 1, layout.cell_cols) = (cf.values[c] * w).transpose();
    }
    b.row(2) = (0.5 * (of.grads[1][0] - of.grads[0][1]) * w).transpose();

    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pf = ctx.facets[l];
        const double n1 = pf.normal.x();
        const double n2 = pf.normal.y();
        const auto st = sym_gradient_trace(of, l);
        const Eigen::MatrixXd sn1 = n1 * st[0] + inv_sqrt2 * n2 * st[2];
        const Eigen::MatrixXd sn2 = inv_sqrt2 * n1 * st[2] + n2 * st[1];
        rhs.leftCols(layout.cell_cols) -= weighted_product(sn1, pf.weights, cf.trace[l][0])
                                        + weighted_product(sn2, pf.weights, cf.trace[l][1]);
        auto fcols = rhs.middleCols(layout.cell_cols + ff.facet_offset[l], ff.facet_dim[l]);
        fcols += weighted_product(sn1, pf.weights, ff.facet_values[l][0])
               + weighted_product(sn2, pf.weights, ff.facet_values[l][1]);
        crhs.block(2, layout.cell_cols + ff.facet_offset[l], 1, ff.facet_dim[l])
            += (0.5 * (n1 * ff.facet_values[l][1] - n2 * ff.facet_values[l][0]) * pf.weights).transpose();
    }
    return constrained_local_solve(a, b, rhs, crhs);
}

namespace
{

Eigen::MatrixXd solve_mass(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& rhs)
{
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success)
        fail(ErrorCode::SingularMass, "local mass matrix is not positive definite");
    return llt.solve(rhs);
}

Eigen::MatrixXd cell_mass(const FieldEval& f, const Eigen::VectorXd& w)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(f.dim, f.dim);
    for (const auto& v : f.values)
        m += weighted_product(v, w, v);
    return m;
}

} // namespace

Eigen::MatrixXd gradient_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field,
                                              int out_field)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const auto& of = ctx.fields[out_field];
    if (of.values.size() != 3 || cf.values.size() != 2)
        fail(ErrorCode::LayoutMismatch, "gradient reconstruction maps vector fields to symmetric tensors");
    const auto layout = input_layout(ctx, cell_field, facet_field);
    const auto& w = ctx.weights;
    const auto sc = sym_gradient(cf);

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(of.dim, layout.total);
    for (int i = 0; i < 3; ++i)
        rhs.leftCols(layout.cell_cols) += weighted_product(of.values[i], w, sc[i]);
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pf = ctx.facets[l];
        const double n1 = pf.normal.x();
        const double n2 = pf.normal.y();
        const auto& t = of.trace[l];
        const Eigen::MatrixXd tn1 = n1 * t[0] + inv_sqrt2 * n2 * t[2];
        const Eigen::MatrixXd tn2 = inv_sqrt2 * n1 * t[2] + n2 * t[1];
        rhs.leftCols(layout.cell_cols) -= weighted_product(tn1, pf.weights, cf.trace[l][0])
                                        + weighted_product(tn2, pf.weights, cf.trace[l][1]);
        rhs.middleCols(layout.cell_cols + ff.facet_offset[l], ff.facet_dim[l])
            += weighted_product(tn1, pf.weights, ff.facet_values[l][0])
             + weighted_product(tn2, pf.weights, ff.facet_values[l][1]);
    }
    return solve_mass(cell_mass(of, w), rhs);
}

Eigen::MatrixXd divergence_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field,
                                                int out_field)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const auto& of = ctx.fields[out_field];
    if (of.values.size() != 1 || cf.values.size() != 2)
        fail(ErrorCode::LayoutMismatch, "divergence reconstruction maps vector fields to scalars");
    const auto layout = input_layout(ctx, cell_field, facet_field);
    const auto& w = ctx.weights;

    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(of.dim, layout.total);
    rhs.leftCols(layout.cell_cols) = weighted_product(of.values[0], w, cf.grads[0][0] + cf.grads[1][1]);
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pf = ctx.facets[l];
        const Eigen::MatrixXd tn = pf.normal.x() * cf.trace[l][0] + pf.normal.y() * cf.trace[l][1];
        const Eigen::MatrixXd fn = pf.normal.x() * ff.facet_values[l][0] + pf.normal.y() * ff.facet_values[l][1];
        rhs.leftCols(layout.cell_cols) -= weighted_product(of.trace[l][0], pf.weights, tn);
        rhs.middleCols(layout.cell_cols + ff.facet_offset[l], ff.facet_dim[l])
            += weighted_product(of.trace[l][0], pf.weights, fn);
    }
    return solve_mass(cell_mass(of, w), rhs);
}

namespace
{
std::vector<Field> hybrid_inputs(const std::shared_ptr<const BrokenSpace>& cell_space,
                                 const std::shared_ptr<const BrokenSpace>& facet_space)
{
    return {Field::cell(cell_space), Field::facet(facet_space)};
}
} // namespace

LocalOperator hho_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                 std::shared_ptr<const BrokenSpace> cell_space,
                                 std::shared_ptr<const BrokenSpace> facet_space,
                                 std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads)
{
    return build_local_operator(
        std::move(topo), hybrid_inputs(cell_space, facet_space), std::move(output),
        [](const PatchContext& ctx) { return elliptic_reconstruction_local(ctx, 0, 1, 2, EllipticRhs::Gradient); },
        quad_degree, threads);
}

LocalOperator sym_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                 std::shared_ptr<const BrokenSpace> cell_space,
                                 std::shared_ptr<const BrokenSpace> facet_space,
                                 std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads)
{
    return build_local_operator(
        std::move(topo), hybrid_inputs(cell_space, facet_space), std::move(output),
        [](const PatchContext& ctx) { return sym_reconstruction_local(ctx, 0, 1, 2); }, quad_degree, threads);
}

LocalOperator gradient_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                      std::shared_ptr<const BrokenSpace> cell_space,
                                      std::shared_ptr<const BrokenSpace> facet_space,
                                      std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads)
{
    return build_local_operator(
        std::move(topo), hybrid_inputs(cell_space, facet_space), std::move(output),
        [](const PatchContext& ctx) { return gradient_reconstruction_local(ctx, 0, 1, 2); }, quad_degree, threads);
}

LocalOperator stokes_velocity_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                             std::shared_ptr<const BrokenSpace> cell_space,
                                             std::shared_ptr<const BrokenSpace> facet_space,
                                             std::shared_ptr<const BrokenSpace> output, int quad_degree,
                                             EllipticRhs rhs, int threads)
{
    return build_local_operator(
        std::move(topo), hybrid_inputs(cell_space, facet_space), std::move(output),
        [rhs](const PatchContext& ctx) { return elliptic_reconstruction_local(ctx, 0, 1, 2, rhs); }, quad_degree,
        threads);
}

LocalOperator divergence_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                        std::shared_ptr<const BrokenSpace> cell_space,
                                        std::shared_ptr<const BrokenSpace> facet_space,
                                        std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads)
{
    return build_local_operator(
        std::move(topo), hybrid_inputs(cell_space, facet_space), std::move(output),
        [](const PatchContext& ctx) { return divergence_reconstruction_local(ctx, 0, 1, 2); }, quad_degree,
        threads);
}

void difference_operators_local(const PatchContext& ctx, const Eigen::MatrixXd& reconstruction, int cell_field,
                                int facet_field, int out_field, Eigen::MatrixXd& cell,
                                std::vector<Eigen::MatrixXd>& facets)
{
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const auto& of = ctx.fields[out_field];
    const auto layout = input_layout(ctx, cell_field, facet_field);
    const auto& w = ctx.weights;
    const int nc = static_cast<int>(cf.values.size());

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(cf.dim, of.dim);
    for (int c = 0; c < nc; ++c)
        b += weighted_product(cf.values[c], w, of.values[c]);
    cell = solve_mass(cell_mass(cf, w), b) * reconstruction;
    cell.leftCols(layout.cell_cols) -= Eigen::MatrixXd::Identity(cf.dim, cf.dim);

    facets.resize(ctx.facets.size());
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pw = ctx.facets[l].weights;
        const int df = ff.facet_dim[l];
        Eigen::MatrixXd mf = Eigen::MatrixXd::Zero(df, df);
        Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(df, of.dim);
        for (int c = 0; c < nc; ++c)
        {
            mf += weighted_product(ff.facet_values[l][c], pw, ff.facet_values[l][c]);
            bf += weighted_product(ff.facet_values[l][c], pw, of.trace[l][c]);
        }
        facets[l] = solve_mass(mf, bf) * reconstruction;
        facets[l].middleCols(layout.cell_cols + ff.facet_offset[l], df) -= Eigen::MatrixXd::Identity(df, df);
    }
}

DifferenceOperators difference_operators(const LocalOperator& reconstruction, int quad_degree)
{
    const auto& inputs = reconstruction.inputs();
    if (inputs.size() != 2 || inputs[0].kind != FieldKind::Cell || inputs[1].kind != FieldKind::Facet)
        fail(ErrorCode::LayoutMismatch, "difference operators need a reconstruction on cell and facet unknowns");
    auto mesh = reconstruction.output()->mesh_ptr();
    auto topo = cell_patches(mesh);
    auto fields = inputs;
    fields.push_back(Field::cell(reconstruction.output()));
    PatchAssembler assembler(topo, fields, quad_degree);
    DifferenceOperators out;
    out.cell.resize(topo->num_patches());
    out.facets.resize(topo->num_patches());
    for (int p = 0; p < static_cast<int>(topo->num_patches()); ++p)
    {
        const auto& ctx = assembler.context(p);
        difference_operators_local(ctx, reconstruction.matrix(ctx.cell), 0, 1, 2, out.cell[ctx.cell],
                                   out.facets[ctx.cell]);
    }
    return out;
}

Eigen::MatrixXd hho_stabilisation_local(const PatchContext& ctx, const Eigen::MatrixXd& reconstruction,
                                        int cell_field, int facet_field, int out_field, double scale)
{
    Eigen::MatrixXd dcell;
    std::vector<Eigen::MatrixXd> dfacets;
    difference_operators_local(ctx, reconstruction, cell_field, facet_field, out_field, dcell, dfacets);
    const auto& cf = ctx.fields[cell_field];
    const auto& ff = ctx.fields[facet_field];
    const int nc = static_cast<int>(cf.values.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(reconstruction.cols(), reconstruction.cols());
    for (std::size_t l = 0; l < ctx.facets.size(); ++l)
    {
        const auto& pw = ctx.facets[l].weights;
        for (int c = 0; c < nc; ++c)
        {
            const Eigen::MatrixXd d
                = ff.facet_values[l][c].transpose() * dfacets[l] - cf.trace[l][c].transpose() * dcell;
            s += d.transpose() * pw.asDiagonal() * d;
        }
    }
    return scale * s;
}

} // namespace polyhybrid
