#include "polyhybrid/patch_assembly.hpp"

#include "polyhybrid/error.hpp"

#include <algorithm>
#include <numeric>

namespace polyhybrid
{

std::shared_ptr<PatchTopology> cell_patches(std::shared_ptr<const PolytopalMesh> mesh)
{
    auto topo = std::make_shared<PatchTopology>();
    const int nc = static_cast<int>(mesh->num_cells());
    std::vector<int> offsets(nc + 1);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::vector<int> cells(nc);
    std::iota(cells.begin(), cells.end(), 0);
    topo->cells = Table(std::move(offsets), std::move(cells));
    topo->facets = mesh->get_faces(2, 1);
    topo->boundary_facets = mesh->get_faces(2, 1);
    topo->mesh = std::move(mesh);
    return topo;
}

Table patch_dof_map(const Field& field, const PatchTopology& topo)
{
    std::vector<std::vector<int>> rows(topo.num_patches());
    for (std::size_t p = 0; p < topo.num_patches(); ++p)
    {
        auto& ids = rows[p];
        if (field.kind == FieldKind::Global)
        {
            ids.push_back(0);
            continue;
        }
        const auto& space = *field.space;
        auto members = field.kind == FieldKind::Cell ? topo.cells[p] : topo.facets[p];
        for (int face : members)
            for (int i = 0; i < space.face_dim(face); ++i)
                ids.push_back(space.offset(face) + i);
    }
    return Table(rows);
}

void PatchSystem::reset(const std::vector<int>& row_dims, const std::vector<int>& col_dims)
{
    row_offsets.assign(1, 0);
    for (int d : row_dims)
        row_offsets.push_back(row_offsets.back() + d);
    col_offsets.assign(1, 0);
    for (int d : col_dims)
        col_offsets.push_back(col_offsets.back() + d);
    matrix.setZero(row_offsets.back(), col_offsets.back());
    vector.setZero(row_offsets.back());
}

void PatchSystem::add_block(std::size_t i, std::size_t j, const Eigen::MatrixXd& m)
{
    if (i >= num_row_fields() || j >= num_col_fields() || m.rows() != row_dim(i) || m.cols() != col_dim(j))
        fail(ErrorCode::BlockShapeMismatch, "contribution does not fit block (" + std::to_string(i) + ","
                                                + std::to_string(j) + ")");
    block(i, j) += m;
}

void PatchSystem::add_vector(std::size_t i, const Eigen::VectorXd& v)
{
    if (i >= num_row_fields() || v.size() != row_dim(i))
        fail(ErrorCode::BlockShapeMismatch, "contribution does not fit vector block " + std::to_string(i));
    segment(i) += v;
}

PatchAssembler::PatchAssembler(std::shared_ptr<const PatchTopology> topo, std::vector<Field> fields, int quad_degree)
  : topo_(std::move(topo)), fields_(std::move(fields)), quad_degree_(quad_degree)
{
    for (const auto& f : fields_)
    {
        if (f.kind != FieldKind::Global && f.space->mesh_ptr() != topo_->mesh)
            fail(ErrorCode::InvalidArgument, "field space lives on a different mesh");
        dof_maps_.push_back(patch_dof_map(f, *topo_));
    }
}

namespace
{

std::vector<Eigen::MatrixXd> expand(const Eigen::MatrixXd& scalar, int components)
{
    const Eigen::Index m = scalar.rows();
    std::vector<Eigen::MatrixXd> out(components);
    for (int c = 0; c < components; ++c)
    {
        out[c].setZero(m * components, scalar.cols());
        out[c].middleRows(c * m, m) = scalar;
    }
    return out;
}

std::vector<std::array<Eigen::MatrixXd, 2>> expand(const std::array<Eigen::MatrixXd, 2>& scalar, int components)
{
    auto gx = expand(scalar[0], components);
    auto gy = expand(scalar[1], components);
    std::vector<std::array<Eigen::MatrixXd, 2>> out(components);
    for (int c = 0; c < components; ++c)
        out[c] = {std::move(gx[c]), std::move(gy[c])};
    return out;
}

} // namespace

void PatchAssembler::build_context(int patch)
{
    const auto& mesh = *topo_->mesh;
    if (topo_->cells.row_size(patch) != 1)
        fail(ErrorCode::InvalidArgument, "patch contexts are defined for single-cell patches");
    auto& ctx = ctx_;
    ctx.patch = patch;
    ctx.cell = topo_->cells[patch][0];
    ctx.mesh = &mesh;
    ctx.polygon = &mesh.cell(ctx.cell);
    ctx.h_T = ctx.polygon->diameter();
    ctx.quad = cell_quadrature(*ctx.polygon, quad_degree_);
    ctx.weights = Eigen::Map<const Eigen::VectorXd>(ctx.quad.weights.data(), ctx.quad.weights.size());

    const auto cell_facets = mesh.get_faces(2, 1)[ctx.cell];
    const auto patch_facets = topo_->facets[patch];
    ctx.facets.resize(patch_facets.size());
    for (std::size_t l = 0; l < patch_facets.size(); ++l)
    {
        auto& pf = ctx.facets[l];
        pf.facet = patch_facets[l];
        pf.local = static_cast<int>(std::find(cell_facets.begin(), cell_facets.end(), pf.facet) - cell_facets.begin());
        pf.sign = mesh.facet_sign(ctx.cell, pf.local);
        pf.normal = static_cast<double>(pf.sign) * mesh.facet_normal(pf.facet);
        pf.h = mesh.facet_length(pf.facet);
        const auto& fv = mesh.facet_vertices(pf.facet);
        pf.quad = facet_quadrature(mesh.vertex(fv[0]), mesh.vertex(fv[1]), quad_degree_);
        pf.weights = Eigen::Map<const Eigen::VectorXd>(pf.quad.weights.data(), pf.quad.weights.size());
    }

    ctx.fields.resize(fields_.size());
    for (std::size_t i = 0; i < fields_.size(); ++i)
    {
        const auto& field = fields_[i];
        auto& fe = ctx.fields[i];
        fe.kind = field.kind;
        fe.dim = static_cast<int>(dof_maps_[i].row_size(patch));
        if (field.kind == FieldKind::Cell)
        {
            const auto& b = field.space->basis(ctx.cell);
            const int nc = b.components();
            fe.cell_basis = &b;
            fe.values = expand(b.values(ctx.quad.points), nc);
            fe.grads = expand(b.gradients(ctx.quad.points), nc);
            fe.laplacians = expand(b.laplacians(ctx.quad.points), nc);
            fe.trace.resize(ctx.facets.size());
            fe.trace_grads.resize(ctx.facets.size());
            for (std::size_t l = 0; l < ctx.facets.size(); ++l)
            {
                const auto& pts = ctx.facets[l].quad.points;
                fe.trace[l] = expand(b.values(pts), nc);
                fe.trace_grads[l] = expand(b.gradients(pts), nc);
            }
        }
        else if (field.kind == FieldKind::Facet)
        {
            fe.facet_bases.resize(ctx.facets.size());
            fe.facet_offset.resize(ctx.facets.size());
            fe.facet_dim.resize(ctx.facets.size());
            fe.facet_values.resize(ctx.facets.size());
            int off = 0;
            for (std::size_t l = 0; l < ctx.facets.size(); ++l)
            {
                const auto& b = field.space->basis(ctx.facets[l].facet);
                fe.facet_bases[l] = &b;
                fe.facet_offset[l] = off;
                fe.facet_dim[l] = b.dim();
                fe.facet_values[l] = expand(b.values(ctx.facets[l].quad.points), b.components());
                off += b.dim();
            }
        }
    }
}

const PatchContext& PatchAssembler::context(int patch)
{
    if (patch < 0 || patch >= static_cast<int>(num_patches()))
        fail(ErrorCode::InvalidArgument, "patch index out of range");
    if (ctx_.patch != patch)
        build_context(patch);
    return ctx_;
}

void PatchAssembler::assemble(int patch, const std::vector<PatchForm>& forms, PatchSystem& out)
{
    std::vector<int> all(fields_.size());
    std::iota(all.begin(), all.end(), 0);
    assemble(patch, all, all, forms, out);
}

void PatchAssembler::assemble(int patch, const std::vector<int>& test, const std::vector<int>& trial,
                              const std::vector<PatchForm>& forms, PatchSystem& out)
{
    const auto& ctx = context(patch);
    std::vector<int> rd;
    std::vector<int> cd;
    out.row_ids.resize(test.size());
    out.col_ids.resize(trial.size());
    for (std::size_t i = 0; i < test.size(); ++i)
    {
        rd.push_back(ctx.fields[test[i]].dim);
        auto ids = dof_maps_[test[i]][patch];
        out.row_ids[i].assign(ids.begin(), ids.end());
    }
    for (std::size_t j = 0; j < trial.size(); ++j)
    {
        cd.push_back(ctx.fields[trial[j]].dim);
        auto ids = dof_maps_[trial[j]][patch];
        out.col_ids[j].assign(ids.begin(), ids.end());
    }
    out.reset(rd, cd);
    out.patch = patch;
    for (const auto& form : forms)
        form(ctx, out);
}

Eigen::MatrixXd weighted_product(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const Eigen::MatrixXd& b)
{
    return a * w.asDiagonal() * b.transpose();
}

} // namespace polyhybrid
