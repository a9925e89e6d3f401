#pragma once

#include "polyhybrid/patch_assembly.hpp"
#include "polyhybrid/spaces.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace polyhybrid
{

/// Per-face matrices mapping gathered input coefficients to output coefficients.
///
/// For a cell-slice output each matrix acts on the patch DOFs of the cell
/// (cell inputs first, then facet inputs in patch order). For a facet-slice
/// output the inputs are facet spaces read on the same facet.
class LocalOperator
{
public:
    LocalOperator() = default;
    LocalOperator(std::vector<Field> inputs, std::shared_ptr<const BrokenSpace> output,
                  std::vector<Eigen::MatrixXd> matrices);

    std::size_t size() const { return matrices_.size(); }
    const Eigen::MatrixXd& matrix(int face) const { return matrices_[face]; }
    const std::vector<Eigen::MatrixXd>& matrices() const { return matrices_; }
    const std::vector<Field>& inputs() const { return inputs_; }
    const std::shared_ptr<const BrokenSpace>& output() const { return output_; }

    /// Input coefficients of one face in operator order; throws LayoutMismatch.
    Eigen::VectorXd gather(int face, const std::vector<const FEFunction*>& in) const;
    Eigen::VectorXd apply(int face, const std::vector<const FEFunction*>& in) const;
    FEFunction apply(const std::vector<const FEFunction*>& in) const;

private:
    std::vector<Field> inputs_;
    std::shared_ptr<const BrokenSpace> output_;
    std::vector<Eigen::MatrixXd> matrices_;
};

/// Per-patch recipe; the context holds the input fields followed by the output field.
using LocalRecipe = std::function<Eigen::MatrixXd(const PatchContext&)>;

LocalOperator build_local_operator(std::shared_ptr<const PatchTopology> topo, std::vector<Field> inputs,
                                   std::shared_ptr<const BrokenSpace> output, const LocalRecipe& recipe,
                                   int quad_degree, int threads = 1);

/// Primal part x of [[A, B^T], [B, 0]] [x; l] = [rhs; constraint_rhs], column by column.
/// Throws SingularSaddle.
Eigen::MatrixXd constrained_local_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& rhs,
                                        const Eigen::MatrixXd& constraint_rhs);

/// C = M^{-1} B between two bases on the same face; throws SingularMass.
Eigen::MatrixXd l2_projection_matrix(const PolyBasis& target, const PolyBasis& source, const QuadratureRule& q,
                                     bool orthonormal_shortcut = false);

/// Face-wise L2 projection between spaces on the same slice.
LocalOperator l2_projector(std::shared_ptr<const BrokenSpace> target, std::shared_ptr<const BrokenSpace> source,
                           bool orthonormal_shortcut = false);

/// Right-hand side used by elliptic reconstructions.
enum class EllipticRhs
{
    /// (grad v_T, grad w) + sum_F (v_F - v_T, grad w . n)
    Gradient,
    /// -(v_T, lap w) + sum_F (v_F, grad w . n)
    Laplacian,
};

// Local recipes. Field indices refer to the patch context: cell input,
// facet input and output (a cell field).

/// Component-wise elliptic projection with one mean constraint per component.
Eigen::MatrixXd elliptic_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field,
                                              int out_field, EllipticRhs rhs = EllipticRhs::Gradient);

/// Symmetric-gradient projection with mean and rotation constraints (vector fields).
Eigen::MatrixXd sym_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field, int out_field);

/// Symmetric gradient reconstruction into a symmetric-tensor cell space.
Eigen::MatrixXd gradient_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field,
                                              int out_field);

/// Divergence reconstruction into a scalar cell space.
Eigen::MatrixXd divergence_reconstruction_local(const PatchContext& ctx, int cell_field, int facet_field,
                                                int out_field);

LocalOperator hho_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                 std::shared_ptr<const BrokenSpace> cell_space,
                                 std::shared_ptr<const BrokenSpace> facet_space,
                                 std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads = 1);

LocalOperator sym_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                 std::shared_ptr<const BrokenSpace> cell_space,
                                 std::shared_ptr<const BrokenSpace> facet_space,
                                 std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads = 1);

LocalOperator gradient_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                      std::shared_ptr<const BrokenSpace> cell_space,
                                      std::shared_ptr<const BrokenSpace> facet_space,
                                      std::shared_ptr<const BrokenSpace> output, int quad_degree, int threads = 1);

LocalOperator stokes_velocity_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                             std::shared_ptr<const BrokenSpace> cell_space,
                                             std::shared_ptr<const BrokenSpace> facet_space,
                                             std::shared_ptr<const BrokenSpace> output, int quad_degree,
                                             EllipticRhs rhs = EllipticRhs::Laplacian, int threads = 1);

LocalOperator divergence_reconstruction(std::shared_ptr<const PatchTopology> topo,
                                        std::shared_ptr<const BrokenSpace> cell_space,
                                        std::shared_ptr<const BrokenSpace> facet_space,
                                        std::shared_ptr<const BrokenSpace> output, int quad_degree,
                                        int threads = 1);

/// Projected differences between a reconstruction and the hybrid unknowns.
///
/// cell[T] = Pi_T(R v) - v_T and facets[T][l] = Pi_F(R v) - v_F for the l-th
/// facet of T, as matrices acting on the patch DOFs of T.
struct DifferenceOperators
{
    std::vector<Eigen::MatrixXd> cell;
    std::vector<std::vector<Eigen::MatrixXd>> facets;
};

DifferenceOperators difference_operators(const LocalOperator& reconstruction, int quad_degree);

/// Recipe form of the above for one patch; fields as in the reconstruction recipes.
void difference_operators_local(const PatchContext& ctx, const Eigen::MatrixXd& reconstruction, int cell_field,
                                int facet_field, int out_field, Eigen::MatrixXd& cell,
                                std::vector<Eigen::MatrixXd>& facets);

/// scale * sum_F int_F ((delta_TF - delta_T) u) ((delta_TF - delta_T) v), assembled directly.
Eigen::MatrixXd hho_stabilisation_local(const PatchContext& ctx, const Eigen::MatrixXd& reconstruction,
                                        int cell_field, int facet_field, int out_field, double scale);

/// Symmetric-tensor coordinates (xx, yy, xy) of the symmetric gradient of every basis function
/// of a vector cell field at the cell points.
std::array<Eigen::MatrixXd, 3> sym_gradient(const FieldEval& field);
std::array<Eigen::MatrixXd, 3> sym_gradient_trace(const FieldEval& field, std::size_t local_facet);

} // namespace polyhybrid
