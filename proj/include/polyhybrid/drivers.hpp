#pragma once

#include "polyhybrid/cases.hpp"
#include "polyhybrid/condensation.hpp"
#include "polyhybrid/local_operators.hpp"
#include "polyhybrid/mesh.hpp"
#include "polyhybrid/spaces.hpp"

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace polyhybrid
{

/// Gradient of a pointwise function, (components x 2).
using GradientFunction = std::function<Eigen::MatrixXd(const Point2&)>;

struct ErrorNorms
{
    double l2 = 0.0;
    double h1 = 0.0;
};

/// L2 and broken H1 errors of a cell-slice function.
ErrorNorms error_norms(const FEFunction& uh, const PointFunction& value, const GradientFunction& grad,
                       int quad_degree);

struct SolveReport
{
    std::string method;
    int k = 0;
    int n = 0;
    double h = 0.0;
    int dofs_full = 0;
    int dofs_condensed = 0;
    double err_l2 = 0.0;
    double err_h1 = 0.0;
    /// Secondary errors and counters, e.g. "flux_l2", "pressure_l2", "p_l2", "z_l2", "iterations".
    std::map<std::string, double> extra;
    std::map<std::string, FEFunction> fields;
    double time_setup = 0.0;
    double time_solve = 0.0;
    SolveStats stats;
    std::vector<std::string> notes;
};

struct DriverOptions
{
    SolverOptions solver;
    int threads = 1;
};

struct ControlOptions
{
    double tol = 1e-10;
    int maxit = 200;
};

/// Assembled global system of a method solved without condensation.
struct LinearSystem
{
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
};

/// Default interior penalty 4k^2 + 4, scaled by 1/h_F inside the form.
double default_dg_penalty(int k);

std::shared_ptr<BrokenSpace> dg_space(std::shared_ptr<const PolytopalMesh> mesh, int k);
LinearSystem dg_poisson_system(const std::shared_ptr<const BrokenSpace>& space, double gamma, const PoissonCase& c);

SolveReport solve_dg_poisson(std::shared_ptr<const PolytopalMesh> mesh, int k, double gamma, const PoissonCase& c,
                             DriverOptions opts = {});

/// tau_scale multiplies the 1/h_F stabilisation weight.
HybridProblem hdg_poisson_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, double tau_scale,
                                  const PoissonCase& c);
SolveReport solve_hdg_poisson(std::shared_ptr<const PolytopalMesh> mesh, int k, double tau_scale,
                              const PoissonCase& c, DriverOptions opts = {});

HybridProblem hho_poisson_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const PoissonCase& c);
SolveReport solve_hho_poisson(std::shared_ptr<const PolytopalMesh> mesh, int k, const PoissonCase& c,
                              DriverOptions opts = {});

HybridProblem hho_elasticity_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const ElasticityCase& c);
SolveReport solve_hho_elasticity(std::shared_ptr<const PolytopalMesh> mesh, int k, const ElasticityCase& c,
                                 DriverOptions opts = {});

HybridProblem hho_stokes_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const StokesCase& c);
SolveReport solve_hho_stokes(std::shared_ptr<const PolytopalMesh> mesh, int k, const StokesCase& c,
                             DriverOptions opts = {});

/// State operator of the control problem with right-hand side f (control set to zero).
HybridProblem hho_control_state_problem(std::shared_ptr<const PolytopalMesh> mesh, int k, const ControlCase& c);
SolveReport solve_hho_optimal_control(std::shared_ptr<const PolytopalMesh> mesh, int k, const ControlCase& c,
                                      DriverOptions opts = {}, ControlOptions control = {});

/// The four S1/S2 terms of the HHO stabilisation of one patch.
///
/// S1 acts on the hybrid unknowns (v_T|_F - v_F), S2 on the reconstruction
/// (Pi_F w - (Pi_T w)|_F); cross terms are composed with the reconstruction
/// matrix so every term lives on the patch DOFs `dofs`.
std::vector<MixedContribution> hho_stabilisation_terms(const PatchContext& ctx, const Eigen::MatrixXd& reconstruction,
                                                       int cell_field, int facet_field, int out_field, double scale,
                                                       const std::vector<DofRef>& dofs);

/// Parameters shared by the command line and the Python module.
struct RunParameters
{
    /// Negative selects the method default.
    double gamma = -1.0;
    double tau = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    double alpha = 0.1;
    double za = -1.0;
    double zb = 0.5;
    std::string case_name;
    DriverOptions driver;
    ControlOptions control;
};

const std::vector<std::string>& method_names();
std::string default_case(const std::string& method);

/// Runs one method by name ("dg", "hdg", "hho", "elasticity", "stokes", "control").
SolveReport run_method(const std::string& method, std::shared_ptr<const PolytopalMesh> mesh, int k,
                       const RunParameters& params);

/// Condensed problem of a hybrid method by name (all but "dg").
HybridProblem hybrid_problem(const std::string& method, std::shared_ptr<const PolytopalMesh> mesh, int k,
                             const RunParameters& params);

struct ConvergenceRow
{
    std::string method;
    int k = 0;
    int n = 0;
    double h = 0.0;
    int dofs_full = 0;
    int dofs_condensed = 0;
    double err_l2 = 0.0;
    double err_h1 = 0.0;
    double eoc_l2 = std::numeric_limits<double>::quiet_NaN();
    double eoc_h1 = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> extra;
    std::map<std::string, double> eoc_extra;
};

/// log(e1/e2) / log(h1/h2); NaN when either error is below the precision floor.
double eoc(double e1, double e2, double h1, double h2);

/// Errors below this are treated as round-off when computing rates.
constexpr double eoc_precision_floor = 1e-9;

/// Runs `solve` on every resolution and attaches rates between consecutive rows.
std::vector<ConvergenceRow> convergence_study(const std::function<SolveReport(int)>& solve, const std::vector<int>& ns);

std::vector<ConvergenceRow> convergence_study(const std::string& method, int k, const std::vector<int>& ns,
                                              const RunParameters& params);

} // namespace polyhybrid
