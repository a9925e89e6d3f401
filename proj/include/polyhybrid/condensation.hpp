#pragma once

#include "polyhybrid/patch_assembly.hpp"
#include "polyhybrid/spaces.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace polyhybrid
{

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// The 2x2 block partition of one patch system.
struct BlockSplit
{
    Eigen::MatrixXd k_ii, k_ib, k_bi, k_bb;
    Eigen::VectorXd b_i, b_b;
};

/// field_block[i] is 0 (interior) or 1 (skeleton) for field i; throws BadPartition.
BlockSplit split_blocks(const PatchSystem& ps, const std::vector<int>& field_block);

/// Maps the interior and skeleton DOFs of every patch to their block numbering.
class CondensationLayout
{
public:
    CondensationLayout(const BlockSpace& space, const PatchTopology& topo);

    const std::vector<int>& field_block() const { return field_block_; }
    int interior_dim() const { return interior_dim_; }
    int skeleton_dim() const { return skeleton_dim_; }
    int num_free() const { return num_free_; }
    std::size_t num_patches() const { return interior_.size(); }
    const std::vector<int>& interior_ids(std::size_t p) const { return interior_[p]; }
    const std::vector<int>& skeleton_ids(std::size_t p) const { return skeleton_[p]; }
    /// Position of a skeleton DOF among the free ones, or -1 when it carries Dirichlet data.
    int free_index(int skeleton_dof) const { return free_index_[skeleton_dof]; }
    bool is_dirichlet(int skeleton_dof) const { return free_index_[skeleton_dof] < 0; }

private:
    std::vector<int> field_block_;
    int interior_dim_ = 0;
    int skeleton_dim_ = 0;
    int num_free_ = 0;
    std::vector<std::vector<int>> interior_;
    std::vector<std::vector<int>> skeleton_;
    std::vector<int> free_index_;
};

/// Fills the system of one patch.
using PatchSource = std::function<void(int, PatchSystem&)>;

/// A two-block problem: a layout, independent patch-system generators and Dirichlet data.
struct HybridProblem
{
    std::shared_ptr<const CondensationLayout> layout;
    /// Each call returns a generator with its own buffers (one per worker thread).
    std::function<PatchSource()> make_source;
    /// Skeleton values; only the Dirichlet entries are read.
    Eigen::VectorXd skeleton_values;
};

/// Skeleton system after eliminating interior DOFs, with what is needed to recover them.
struct CondensedSystem
{
    std::shared_ptr<const CondensationLayout> layout;
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    /// Free rows x skeleton columns holding the couplings to Dirichlet DOFs.
    SparseMatrix dirichlet_coupling;
    Eigen::VectorXd skeleton_values;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> factors;
    std::vector<Eigen::MatrixXd> k_ib;
    std::vector<Eigen::MatrixXd> k_bi;
    std::vector<Eigen::VectorXd> b_i;
};

/// Per-patch Schur complements scattered into the skeleton matrix; throws SingularInterior.
CondensedSystem condense(const HybridProblem& problem, int threads = 1);

/// Rebuilds the skeleton right-hand side from new patch vectors (interior and skeleton parts per patch).
void recondense_rhs(CondensedSystem& cs, const std::vector<Eigen::VectorXd>& b_i,
                    const std::vector<Eigen::VectorXd>& b_b);

/// Free skeleton values expanded with the Dirichlet data.
Eigen::VectorXd expand_skeleton(const CondensedSystem& cs, const Eigen::VectorXd& free_values);

/// Interior DOFs from u_i = K_ii^{-1} (b_i - K_ib u_b), patch by patch.
Eigen::VectorXd back_substitute(const CondensedSystem& cs, const Eigen::VectorXd& skeleton);

enum class SolverKind
{
    Cg,
    Lu,
};

SolverKind parse_solver(const std::string& name);

struct SolverOptions
{
    SolverKind kind = SolverKind::Cg;
    double tol = 1e-12;
    /// Negative selects 10 * dim.
    int maxit = -1;
};

struct SolveStats
{
    int iterations = 0;
    double residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients; throws NotConverged or IndefiniteDetected.
Eigen::VectorXd conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b, double tol, int maxit,
                                   SolveStats* stats = nullptr);

/// Solver for repeated right-hand sides with one operator (the sparse LU is factorised once).
class SkeletonSolver
{
public:
    SkeletonSolver(const SparseMatrix& matrix, SolverOptions options);
    ~SkeletonSolver();
    SkeletonSolver(const SkeletonSolver&) = delete;
    SkeletonSolver& operator=(const SkeletonSolver&) = delete;

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs);
    const SolveStats& stats() const { return stats_; }

private:
    struct Lu;
    const SparseMatrix& matrix_;
    SolverOptions options_;
    std::unique_ptr<Lu> lu_;
    SolveStats stats_;
};

Eigen::VectorXd solve_condensed(const CondensedSystem& cs, SolverOptions options, SolveStats* stats = nullptr);

struct HybridSolution
{
    Eigen::VectorXd interior;
    Eigen::VectorXd skeleton;
    SolveStats stats;
};

/// Condense, solve and back-substitute.
HybridSolution solve_hybrid(const HybridProblem& problem, SolverOptions options, int threads = 1);

/// Uncondensed system on [interior; free skeleton] with Dirichlet DOFs moved to the right-hand side.
struct MonolithicSystem
{
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
};

MonolithicSystem assemble_monolithic(const HybridProblem& problem);

/// Dense LU solve of the monolithic system.
Eigen::VectorXd solve_monolithic_dense(const MonolithicSystem& system);

/// [interior; free skeleton] from a full solution.
Eigen::VectorXd monolithic_vector(const CondensationLayout& layout, const Eigen::VectorXd& interior,
                                  const Eigen::VectorXd& skeleton);

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Reference to DOF `dof` of field `field` of a patch system.
struct DofRef
{
    int field = 0;
    int dof = 0;
    bool operator==(const DofRef&) const = default;
};

/// One term of a patch system expressed on its own DOF lists.
struct MixedContribution
{
    std::vector<DofRef> rows;
    std::vector<DofRef> cols;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd vector;
};

/// Patch DOFs of all fields of a patch system, in system order.
std::vector<DofRef> patch_dofs(const PatchSystem& ps);

/// Scatter-adds every contribution into the patch system; throws DofMapMismatch.
void merge_mixed_blocks(std::span<const MixedContribution> contributions, PatchSystem& ps);

} // namespace polyhybrid
