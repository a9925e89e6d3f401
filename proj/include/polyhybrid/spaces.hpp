#pragma once

#include "polyhybrid/basis.hpp"
#include "polyhybrid/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace polyhybrid
{

/// Pointwise vector-valued function; the result length is the number of value components.
using PointFunction = std::function<Eigen::VectorXd(const Point2&)>;

PointFunction scalar_function(std::function<double(const Point2&)> g);
PointFunction vector_function(std::function<Point2(const Point2&)> g);

struct SpaceOptions
{
    bool orthonormal = false;
    bool zero_mean = false;
    std::vector<std::string> dirichlet_tags;
    /// Exactness of the rule used for mass matrices and projections; negative selects 2 * (degree + 2).
    int quad_degree = -1;
};

/// Piecewise polynomials on the cells (slice 2) or the facets (slice 1) of a mesh.
///
/// DOFs are numbered face by face; inside a face they follow the basis order.
class BrokenSpace
{
public:
    BrokenSpace(std::shared_ptr<const PolytopalMesh> mesh, int slice_dim, int degree, ValueShape shape,
                SpaceOptions options = {});

    const PolytopalMesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const PolytopalMesh>& mesh_ptr() const { return mesh_; }
    int slice_dim() const { return slice_dim_; }
    int degree() const { return degree_; }
    ValueShape shape() const { return shape_; }
    int components() const { return num_components(shape_); }
    const SpaceOptions& options() const { return options_; }
    int quad_degree() const { return quad_degree_; }

    int num_faces() const { return static_cast<int>(bases_.size()); }
    int dim() const { return offsets_.back(); }
    int face_dim(int face) const { return offsets_[face + 1] - offsets_[face]; }
    int offset(int face) const { return offsets_[face]; }
    const PolyBasis& basis(int face) const { return bases_[face]; }

    QuadratureRule quadrature(int face) const;
    QuadratureRule quadrature(int face, int degree) const;

    bool is_dirichlet(int dof) const { return dirichlet_[dof] != 0; }
    bool is_dirichlet_face(int face) const;
    int num_dirichlet() const;
    int num_free() const { return dim() - num_dirichlet(); }

    /// Same bases and numbering with every DOF free.
    std::shared_ptr<BrokenSpace> without_bcs() const;

private:
    std::shared_ptr<const PolytopalMesh> mesh_;
    int slice_dim_;
    int degree_;
    ValueShape shape_;
    SpaceOptions options_;
    int quad_degree_;
    std::vector<PolyBasis> bases_;
    std::vector<int> offsets_;
    std::vector<char> dirichlet_;
};

std::shared_ptr<BrokenSpace> broken_space(std::shared_ptr<const PolytopalMesh> mesh, int slice_dim, int degree,
                                          ValueShape shape = ValueShape::Scalar, SpaceOptions options = {});

/// Coefficient vector attached to a space; Dirichlet values live in the same vector.
class FEFunction
{
public:
    FEFunction() = default;
    explicit FEFunction(std::shared_ptr<const BrokenSpace> space);
    FEFunction(std::shared_ptr<const BrokenSpace> space, Eigen::VectorXd coeffs);

    const BrokenSpace& space() const { return *space_; }
    const std::shared_ptr<const BrokenSpace>& space_ptr() const { return space_; }
    Eigen::VectorXd& coefficients() { return coeffs_; }
    const Eigen::VectorXd& coefficients() const { return coeffs_; }

    Eigen::VectorXd face_coefficients(int face) const;

    /// Values at points of the given face, (components x npoints); throws FaceOutOfSlice.
    Eigen::MatrixXd evaluate(int slice_dim, int face, const std::vector<Point2>& pts) const;
    /// Gradients at points of a cell: row c*2 + dir holds d/dx_dir of component c.
    Eigen::MatrixXd gradient(int cell, const std::vector<Point2>& pts) const;

private:
    std::shared_ptr<const BrokenSpace> space_;
    Eigen::VectorXd coeffs_;
};

/// Face-wise L2 projection; the orthonormal shortcut skips the mass solve when allowed.
FEFunction interpolate(std::shared_ptr<const BrokenSpace> space, const PointFunction& g,
                       bool orthonormal_shortcut = true);

/// Coefficients of the local L2 projection of g onto the basis of one face.
Eigen::VectorXd project_on_face(const PolyBasis& basis, const QuadratureRule& q, const PointFunction& g);

enum class FieldKind
{
    Cell,
    Facet,
    Global,
};

/// One unknown of a multi-field problem. Global fields hold a single scalar shared by all patches.
struct Field
{
    FieldKind kind = FieldKind::Cell;
    std::shared_ptr<const BrokenSpace> space;
    std::string name;

    static Field cell(std::shared_ptr<const BrokenSpace> space, std::string name = {});
    static Field facet(std::shared_ptr<const BrokenSpace> space, std::string name = {});
    static Field global(std::string name = {});

    int dim() const { return kind == FieldKind::Global ? 1 : space->dim(); }
    bool is_dirichlet(int dof) const { return kind != FieldKind::Global && space->is_dirichlet(dof); }
};

/// Fields grouped into consecutive blocks; block 0 is condensed, block 1 is the skeleton.
class BlockSpace
{
public:
    BlockSpace(std::vector<Field> fields, std::vector<int> block_sizes);

    std::size_t num_fields() const { return fields_.size(); }
    std::size_t num_blocks() const { return block_sizes_.size(); }
    const std::vector<Field>& fields() const { return fields_; }
    const Field& field(std::size_t i) const { return fields_[i]; }
    int block_of(std::size_t field) const { return block_of_[field]; }
    /// Offset of a field within its block numbering.
    int field_offset(std::size_t field) const { return field_offset_[field]; }
    int block_dim(std::size_t block) const { return block_dim_[block]; }
    std::vector<int> fields_in_block(std::size_t block) const;
    int dim() const;

private:
    std::vector<Field> fields_;
    std::vector<int> block_sizes_;
    std::vector<int> block_of_;
    std::vector<int> field_offset_;
    std::vector<int> block_dim_;
};

} // namespace polyhybrid
