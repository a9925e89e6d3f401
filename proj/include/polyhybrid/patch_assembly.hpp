#pragma once

#include "polyhybrid/spaces.hpp"
#include "polyhybrid/table.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace polyhybrid
{

/// Member cells, member facets and boundary facets of every patch.
struct PatchTopology
{
    std::shared_ptr<const PolytopalMesh> mesh;
    Table cells;
    Table facets;
    Table boundary_facets;

    std::size_t num_patches() const { return cells.size(); }
};

/// One patch per cell holding the cell and all of its facets.
std::shared_ptr<PatchTopology> cell_patches(std::shared_ptr<const PolytopalMesh> mesh);

/// Global ids of a field's DOFs in every patch: cell DOFs first, then facets in patch order.
Table patch_dof_map(const Field& field, const PatchTopology& topo);

struct PatchFacet
{
    int facet = -1;
    int local = -1;
    int sign = 1;
    Point2 normal;  // outward for the patch cell
    double h = 0.0; // facet length
    QuadratureRule quad;
    Eigen::VectorXd weights;
};

/// Basis data of one field evaluated on the quadrature of a patch.
///
/// Cell fields fill `values` / `grads` / `laplacians` at cell points and
/// `trace` / `trace_grads` at the points of each patch facet. Facet fields
/// fill `facet_values`, each local to its own facet and placed at
/// `facet_offset` inside the field's patch block. Matrices are
/// (functions x points); the outer index of `values` is the value component.
struct FieldEval
{
    FieldKind kind = FieldKind::Cell;
    int dim = 0;
    const PolyBasis* cell_basis = nullptr;
    std::vector<Eigen::MatrixXd> values;
    std::vector<std::array<Eigen::MatrixXd, 2>> grads;
    std::vector<Eigen::MatrixXd> laplacians;
    std::vector<std::vector<Eigen::MatrixXd>> trace;
    std::vector<std::vector<std::array<Eigen::MatrixXd, 2>>> trace_grads;

    std::vector<const PolyBasis*> facet_bases;
    std::vector<int> facet_offset;
    std::vector<int> facet_dim;
    std::vector<std::vector<Eigen::MatrixXd>> facet_values;
};

/// Everything a local form needs on one cell patch.
struct PatchContext
{
    int patch = -1;
    int cell = -1;
    const PolytopalMesh* mesh = nullptr;
    const Polygon* polygon = nullptr;
    double h_T = 0.0;
    QuadratureRule quad;
    Eigen::VectorXd weights;
    std::vector<PatchFacet> facets;
    std::vector<FieldEval> fields;
};

/// Dense block system of one patch, with per-field global DOF ids.
class PatchSystem
{
public:
    void reset(const std::vector<int>& row_dims, const std::vector<int>& col_dims);

    int rows() const { return static_cast<int>(matrix.rows()); }
    int cols() const { return static_cast<int>(matrix.cols()); }
    std::size_t num_row_fields() const { return row_offsets.size() - 1; }
    std::size_t num_col_fields() const { return col_offsets.size() - 1; }
    int row_dim(std::size_t i) const { return row_offsets[i + 1] - row_offsets[i]; }
    int col_dim(std::size_t j) const { return col_offsets[j + 1] - col_offsets[j]; }

    auto block(std::size_t i, std::size_t j)
    {
        return matrix.block(row_offsets[i], col_offsets[j], row_dim(i), col_dim(j));
    }
    auto block(std::size_t i, std::size_t j) const
    {
        return matrix.block(row_offsets[i], col_offsets[j], row_dim(i), col_dim(j));
    }
    auto segment(std::size_t i) { return vector.segment(row_offsets[i], row_dim(i)); }
    auto segment(std::size_t i) const { return vector.segment(row_offsets[i], row_dim(i)); }

    /// Adds into block (i,j); throws BlockShapeMismatch.
    void add_block(std::size_t i, std::size_t j, const Eigen::MatrixXd& m);
    void add_vector(std::size_t i, const Eigen::VectorXd& v);

    int patch = -1;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd vector;
    std::vector<int> row_offsets{0};
    std::vector<int> col_offsets{0};
    std::vector<std::vector<int>> row_ids;
    std::vector<std::vector<int>> col_ids;
};

/// Local form: receives the patch data and adds its contribution to the system.
/// Block indices refer to positions in the test / trial field lists of the call.
using PatchForm = std::function<void(const PatchContext&, PatchSystem&)>;

/// Evaluates patch contexts and assembles patch systems one patch at a time.
///
/// The context and system buffers are reused between patches; give every
/// thread its own assembler.
class PatchAssembler
{
public:
    PatchAssembler(std::shared_ptr<const PatchTopology> topo, std::vector<Field> fields, int quad_degree);

    std::size_t num_patches() const { return topo_->num_patches(); }
    const PatchTopology& topology() const { return *topo_; }
    const std::shared_ptr<const PatchTopology>& topology_ptr() const { return topo_; }
    const std::vector<Field>& fields() const { return fields_; }
    int quad_degree() const { return quad_degree_; }
    const Table& dof_map(std::size_t field) const { return dof_maps_[field]; }

    const PatchContext& context(int patch);

    /// Square system over all fields.
    void assemble(int patch, const std::vector<PatchForm>& forms, PatchSystem& out);
    void assemble(int patch, const std::vector<int>& test, const std::vector<int>& trial,
                  const std::vector<PatchForm>& forms, PatchSystem& out);

private:
    void build_context(int patch);

    std::shared_ptr<const PatchTopology> topo_;
    std::vector<Field> fields_;
    int quad_degree_;
    std::vector<Table> dof_maps_;
    PatchContext ctx_;
};

/// A diag(w) B^T.
Eigen::MatrixXd weighted_product(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, const Eigen::MatrixXd& b);

} // namespace polyhybrid
