#include "polyhybrid/spaces.hpp"

#include "polyhybrid/error.hpp"

#include <algorithm>

namespace polyhybrid
{

PointFunction scalar_function(std::function<double(const Point2&)> g)
{
    return [g = std::move(g)](const Point2& x) {
        Eigen::VectorXd v(1);
        v(0) = g(x);
        return v;
    };
}

PointFunction vector_function(std::function<Point2(const Point2&)> g)
{
    return [g = std::move(g)](const Point2& x) { return Eigen::VectorXd(g(x)); };
}

BrokenSpace::BrokenSpace(std::shared_ptr<const PolytopalMesh> mesh, int slice_dim, int degree, ValueShape shape,
                         SpaceOptions options)
  : mesh_(std::move(mesh)),
    slice_dim_(slice_dim),
    degree_(degree),
    shape_(shape),
    options_(std::move(options)),
    quad_degree_(options_.quad_degree >= 0 ? options_.quad_degree : 2 * (degree + 2))
{
    if (!mesh_)
        fail(ErrorCode::InvalidArgument, "space needs a mesh");
    if (slice_dim_ != 1 && slice_dim_ != 2)
        fail(ErrorCode::InvalidArgument, "broken spaces live on cells (2) or facets (1)");
    if (degree_ < 0)
        fail(ErrorCode::InvalidArgument, "space degree must be nonnegative");
    if (options_.zero_mean && shape_ != ValueShape::Scalar)
        fail(ErrorCode::InvalidArgument, "zero-mean restriction applies to scalar spaces");

    std::vector<int> tags;
    for (const auto& name : options_.dirichlet_tags)
        tags.push_back(mesh_->labels().tag_of(name));

    const int nfaces = static_cast<int>(mesh_->num_faces(slice_dim_));
    bases_.reserve(nfaces);
    offsets_.assign(1, 0);
    for (int f = 0; f < nfaces; ++f)
    {
        PolyBasis b;
        if (slice_dim_ == 2)
            b = PolyBasis::cell(mesh_->cell(f), degree_, shape_);
        else
        {
            const auto& fv = mesh_->facet_vertices(f);
            b = PolyBasis::facet(mesh_->vertex(fv[0]), mesh_->vertex(fv[1]), degree_, shape_);
        }
        if (options_.zero_mean || options_.orthonormal)
        {
            const auto q = quadrature(f);
            if (options_.zero_mean)
                b = b.zero_mean(q);
            if (options_.orthonormal)
                b = b.orthonormalize(q);
        }
        offsets_.push_back(offsets_.back() + b.dim());
        bases_.push_back(std::move(b));
    }

    dirichlet_.assign(offsets_.back(), 0);
    for (int f = 0; f < nfaces; ++f)
        if (std::find(tags.begin(), tags.end(), mesh_->labels().tag(slice_dim_, f)) != tags.end())
            std::fill(dirichlet_.begin() + offsets_[f], dirichlet_.begin() + offsets_[f + 1], 1);
}

QuadratureRule BrokenSpace::quadrature(int face) const
{
    return quadrature(face, quad_degree_);
}

QuadratureRule BrokenSpace::quadrature(int face, int degree) const
{
    if (slice_dim_ == 2)
        return cell_quadrature(mesh_->cell(face), degree);
    const auto& fv = mesh_->facet_vertices(face);
    return facet_quadrature(mesh_->vertex(fv[0]), mesh_->vertex(fv[1]), degree);
}

bool BrokenSpace::is_dirichlet_face(int face) const
{
    return face_dim(face) > 0 && dirichlet_[offsets_[face]] != 0;
}

int BrokenSpace::num_dirichlet() const
{
    return static_cast<int>(std::count(dirichlet_.begin(), dirichlet_.end(), 1));
}

std::shared_ptr<BrokenSpace> BrokenSpace::without_bcs() const
{
    auto copy = std::make_shared<BrokenSpace>(*this);
    copy->options_.dirichlet_tags.clear();
    std::fill(copy->dirichlet_.begin(), copy->dirichlet_.end(), 0);
    return copy;
}

std::shared_ptr<BrokenSpace> broken_space(std::shared_ptr<const PolytopalMesh> mesh, int slice_dim, int degree,
                                          ValueShape shape, SpaceOptions options)
{
    return std::make_shared<BrokenSpace>(std::move(mesh), slice_dim, degree, shape, std::move(options));
}

FEFunction::FEFunction(std::shared_ptr<const BrokenSpace> space)
  : space_(std::move(space)), coeffs_(Eigen::VectorXd::Zero(space_->dim()))
{
}

FEFunction::FEFunction(std::shared_ptr<const BrokenSpace> space, Eigen::VectorXd coeffs)
  : space_(std::move(space)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != space_->dim())
        fail(ErrorCode::LayoutMismatch, "coefficient vector length does not match the space dimension");
}

Eigen::VectorXd FEFunction::face_coefficients(int face) const
{
    return coeffs_.segment(space_->offset(face), space_->face_dim(face));
}

Eigen::MatrixXd FEFunction::evaluate(int slice_dim, int face, const std::vector<Point2>& pts) const
{
    if (slice_dim != space_->slice_dim() || face < 0 || face >= space_->num_faces())
        fail(ErrorCode::FaceOutOfSlice, "face " + std::to_string(face) + " of dimension " + std::to_string(slice_dim)
                                            + " is not in the slice of this function");
    const auto& b = space_->basis(face);
    const Eigen::MatrixXd v = b.values(pts);
    const int m = b.scalar_dim();
    const int nc = b.components();
    Eigen::MatrixXd out(nc, static_cast<Eigen::Index>(pts.size()));
    const Eigen::VectorXd c = face_coefficients(face);
    for (int k = 0; k < nc; ++k)
        out.row(k) = c.segment(k * m, m).transpose() * v;
    return out;
}

Eigen::MatrixXd FEFunction::gradient(int cell, const std::vector<Point2>& pts) const
{
    if (space_->slice_dim() != 2 || cell < 0 || cell >= space_->num_faces())
        fail(ErrorCode::FaceOutOfSlice, "gradients are evaluated on cells of a cell-slice function");
    const auto& b = space_->basis(cell);
    const auto g = b.gradients(pts);
    const int m = b.scalar_dim();
    const int nc = b.components();
    const Eigen::VectorXd c = face_coefficients(cell);
    Eigen::MatrixXd out(2 * nc, static_cast<Eigen::Index>(pts.size()));
    for (int k = 0; k < nc; ++k)
        for (int d = 0; d < 2; ++d)
            out.row(2 * k + d) = c.segment(k * m, m).transpose() * g[d];
    return out;
}

Eigen::VectorXd project_on_face(const PolyBasis& basis, const QuadratureRule& q, const PointFunction& g)
{
    const Eigen::MatrixXd v = basis.values(q.points);
    const int m = basis.scalar_dim();
    const int nc = basis.components();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, nc);
    for (std::size_t i = 0; i < q.size(); ++i)
    {
        const Eigen::VectorXd gv = g(q.points[i]);
        if (gv.size() != nc)
            fail(ErrorCode::LayoutMismatch, "function value has the wrong number of components");
        rhs += q.weights[i] * v.col(i) * gv.transpose();
    }
    const Eigen::MatrixXd mass = basis.scalar_mass(q);
    const Eigen::MatrixXd c = mass.ldlt().solve(rhs);
    Eigen::VectorXd out(m * nc);
    for (int k = 0; k < nc; ++k)
        out.segment(k * m, m) = c.col(k);
    return out;
}

FEFunction interpolate(std::shared_ptr<const BrokenSpace> space, const PointFunction& g, bool orthonormal_shortcut)
{
    FEFunction u(space);
    const bool shortcut = orthonormal_shortcut && space->options().orthonormal;
    for (int f = 0; f < space->num_faces(); ++f)
    {
        const auto& b = space->basis(f);
        const auto q = space->quadrature(f);
        Eigen::VectorXd c;
        if (shortcut)
        {
            const Eigen::MatrixXd v = b.values(q.points);
            const int m = b.scalar_dim();
            const int nc = b.components();
            c = Eigen::VectorXd::Zero(m * nc);
            for (std::size_t i = 0; i < q.size(); ++i)
            {
                const Eigen::VectorXd gv = g(q.points[i]);
                if (gv.size() != nc)
                    fail(ErrorCode::LayoutMismatch, "function value has the wrong number of components");
                for (int k = 0; k < nc; ++k)
                    c.segment(k * m, m) += q.weights[i] * gv(k) * v.col(i);
            }
        }
        else
            c = project_on_face(b, q, g);
        u.coefficients().segment(space->offset(f), space->face_dim(f)) = c;
    }
    return u;
}

Field Field::cell(std::shared_ptr<const BrokenSpace> space, std::string name)
{
    if (!space || space->slice_dim() != 2)
        fail(ErrorCode::BadPartition, "cell field needs a cell-slice space");
    return Field{FieldKind::Cell, std::move(space), std::move(name)};
}

Field Field::facet(std::shared_ptr<const BrokenSpace> space, std::string name)
{
    if (!space || space->slice_dim() != 1)
        fail(ErrorCode::BadPartition, "facet field needs a facet-slice space");
    return Field{FieldKind::Facet, std::move(space), std::move(name)};
}

Field Field::global(std::string name)
{
    return Field{FieldKind::Global, nullptr, std::move(name)};
}

BlockSpace::BlockSpace(std::vector<Field> fields, std::vector<int> block_sizes)
  : fields_(std::move(fields)), block_sizes_(std::move(block_sizes))
{
    int total = 0;
    for (int s : block_sizes_)
    {
        if (s <= 0)
            fail(ErrorCode::BadPartition, "every block needs at least one field");
        total += s;
    }
    if (total != static_cast<int>(fields_.size()))
        fail(ErrorCode::BadPartition, "block sizes do not cover the fields exactly once");
    for (const auto& f : fields_)
        if (f.kind != FieldKind::Global && !f.space)
            fail(ErrorCode::BadPartition, "field without a space");
    block_dim_.assign(block_sizes_.size(), 0);
    int field = 0;
    for (std::size_t b = 0; b < block_sizes_.size(); ++b)
        for (int i = 0; i < block_sizes_[b]; ++i, ++field)
        {
            block_of_.push_back(static_cast<int>(b));
            field_offset_.push_back(block_dim_[b]);
            block_dim_[b] += fields_[field].dim();
        }
}

std::vector<int> BlockSpace::fields_in_block(std::size_t block) const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < fields_.size(); ++i)
        if (block_of_[i] == static_cast<int>(block))
            out.push_back(static_cast<int>(i));
    return out;
}

int BlockSpace::dim() const
{
    int d = 0;
    for (int b : block_dim_)
        d += b;
    return d;
}

} // namespace polyhybrid
