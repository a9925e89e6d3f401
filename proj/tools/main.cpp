// Command-line front end: mesh generation, single solves and convergence tables.
//
// Exit codes: 0 success, 1 numeric failure, 2 usage error.

#include "polyhybrid/drivers.hpp"
#include "polyhybrid/error.hpp"
#include "polyhybrid/io.hpp"
#include "polyhybrid/mesh.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace ph = polyhybrid;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_numeric = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Config
{
    std::string method = "hho";
    std::string case_name;
    int k = 1;
    int n = 4;
    std::vector<int> n_list;
    double gamma = -1.0;
    double tau = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    double alpha = 0.1;
    double za = -1.0;
    double zb = 0.5;
    std::string solver = "cg";
    double tol = 1e-12;
    int threads = 1;
    double perturb = 0.0;
    std::string out;
    std::string dump_matrix;
    std::string config;
};

/// Options shared by the subcommands; the returned map lets file values fill unset flags.
std::map<std::string, CLI::Option*> add_common(CLI::App& app, Config& c, bool with_method)
{
    std::map<std::string, CLI::Option*> o;
    if (with_method)
    {
        o["method"] = app.add_option("--method", c.method, "dg, hdg, hho, elasticity, stokes or control");
        o["k"] = app.add_option("--k", c.k, "polynomial degree");
        o["case"] = app.add_option("--case", c.case_name, "manufactured case (method default when empty)");
        o["gamma"] = app.add_option("--gamma", c.gamma, "DG penalty factor (default 4k^2+4)");
        o["tau"] = app.add_option("--tau", c.tau, "HDG stabilisation factor multiplying 1/h_F");
        o["lambda"] = app.add_option("--lambda", c.lambda, "first Lame parameter");
        o["mu"] = app.add_option("--mu", c.mu, "shear modulus");
        o["alpha"] = app.add_option("--alpha", c.alpha, "control cost");
        o["za"] = app.add_option("--za", c.za, "lower control bound");
        o["zb"] = app.add_option("--zb", c.zb, "upper control bound");
        o["solver"] = app.add_option("--solver", c.solver, "skeleton solver: cg or lu");
        o["tol"] = app.add_option("--tol", c.tol, "cg relative tolerance");
        o["threads"] = app.add_option("--threads", c.threads, "threads for patch-parallel assembly");
    }
    o["perturb"] = app.add_option("--perturb", c.perturb, "relative site perturbation of the Voronoi grid");
    o["out"] = app.add_option("--out", c.out, "output path");
    app.add_option("--config", c.config, "JSON file with defaults; flags override it");
    return o;
}

template <class T>
void fill_from(const nlohmann::json& j, const std::string& key, CLI::Option* opt, T& target)
{
    if (opt && opt->count() == 0 && j.contains(key))
        target = j.at(key).get<T>();
}

void apply_config(Config& c, const std::map<std::string, CLI::Option*>& o, CLI::Option* n_opt,
                  CLI::Option* n_list_opt)
{
    if (c.config.empty())
        return;
    std::ifstream in(c.config);
    if (!in)
        throw UsageError("cannot read config file '" + c.config + "'");
    nlohmann::json j;
    try
    {
        in >> j;
        auto get = [&](const std::string& key) { return o.count(key) ? o.at(key) : nullptr; };
        fill_from(j, "method", get("method"), c.method);
        fill_from(j, "k", get("k"), c.k);
        fill_from(j, "case", get("case"), c.case_name);
        fill_from(j, "gamma", get("gamma"), c.gamma);
        fill_from(j, "tau", get("tau"), c.tau);
        fill_from(j, "lambda", get("lambda"), c.lambda);
        fill_from(j, "mu", get("mu"), c.mu);
        fill_from(j, "alpha", get("alpha"), c.alpha);
        fill_from(j, "za", get("za"), c.za);
        fill_from(j, "zb", get("zb"), c.zb);
        fill_from(j, "solver", get("solver"), c.solver);
        fill_from(j, "tol", get("tol"), c.tol);
        fill_from(j, "threads", get("threads"), c.threads);
        fill_from(j, "perturb", get("perturb"), c.perturb);
        fill_from(j, "out", get("out"), c.out);
        fill_from(j, "n", n_opt, c.n);
        fill_from(j, "n_list", n_list_opt, c.n_list);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw UsageError(std::string("invalid config file: ") + e.what());
    }
}

void validate_n(int n)
{
    if (n < 2)
        throw UsageError("mesh resolution n must be at least 2, got " + std::to_string(n));
}

void validate(const Config& c)
{
    const auto& names = ph::method_names();
    if (std::find(names.begin(), names.end(), c.method) == names.end())
        throw UsageError("unknown method '" + c.method + "'");
    if (c.k < (c.method == "dg" ? 1 : 0))
        throw UsageError("degree k = " + std::to_string(c.k) + " is not supported by " + c.method);
    if (c.method == "control" && c.k > 1)
        throw UsageError("control supports k = 0 or 1");
    if (c.gamma != -1.0 && !(c.gamma > 0.0))
        throw UsageError("--gamma must be positive");
    if (!(c.tau > 0.0))
        throw UsageError("--tau must be positive");
    if (!(c.lambda > 0.0) || !(c.mu > 0.0))
        throw UsageError("--lambda and --mu must be positive");
    if (!(c.alpha > 0.0))
        throw UsageError("--alpha must be positive");
    if (!(c.za < c.zb))
        throw UsageError("--za must be smaller than --zb");
    if (c.solver != "cg" && c.solver != "lu" && c.solver != "dense_lu")
        throw UsageError("--solver must be cg or lu");
    if (!(c.tol > 0.0))
        throw UsageError("--tol must be positive");
    if (c.threads < 1)
        throw UsageError("--threads must be at least 1");
    if (!(c.perturb >= 0.0 && c.perturb < 0.5))
        throw UsageError("--perturb must lie in [0, 0.5)");
    // resolve the case name now so a typo is a usage error, not a numeric one
    const auto name = c.case_name.empty() ? ph::default_case(c.method) : c.case_name;
    try
    {
        if (c.method == "elasticity")
            ph::elasticity_case(name, c.lambda, c.mu);
        else if (c.method == "stokes")
            ph::stokes_case(name);
        else if (c.method == "control")
            ph::control_case(name, c.alpha, c.za, c.zb);
        else
            ph::poisson_case(name);
    }
    catch (const ph::Error& e)
    {
        throw UsageError(e.what());
    }
}

ph::RunParameters parameters(const Config& c)
{
    ph::RunParameters p;
    p.gamma = c.gamma;
    p.tau = c.tau;
    p.lambda = c.lambda;
    p.mu = c.mu;
    p.alpha = c.alpha;
    p.za = c.za;
    p.zb = c.zb;
    p.case_name = c.case_name;
    p.driver.solver.kind = ph::parse_solver(c.solver);
    p.driver.solver.tol = c.tol;
    p.driver.threads = c.threads;
    return p;
}

std::shared_ptr<const ph::PolytopalMesh> make_mesh(int n, double perturb)
{
    if (perturb > 0.0)
        return std::make_shared<const ph::PolytopalMesh>(ph::voronoi_mesh(ph::perturbed_grid_sites(n, perturb, 1)));
    return std::make_shared<const ph::PolytopalMesh>(ph::voronoi_mesh(n));
}

std::string sidecar_path(const std::string& vtk)
{
    const auto dot = vtk.find_last_of('.');
    const auto slash = vtk.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return vtk + ".json";
    return vtk.substr(0, dot) + ".json";
}

int cmd_mesh(const Config& c)
{
    validate_n(c.n);
    if (!(c.perturb >= 0.0 && c.perturb < 0.5))
        throw UsageError("--perturb must lie in [0, 0.5)");
    const auto mesh = make_mesh(c.n, c.perturb);
    const std::string out = c.out.empty() ? "mesh.vtk" : c.out;
    ph::write_vtk_mesh(*mesh, out);
    ph::write_mesh_summary(*mesh, sidecar_path(out));
    std::cout << ph::mesh_summary_json(*mesh) << '\n';
    return exit_ok;
}

int cmd_solve(const Config& c)
{
    validate_n(c.n);
    validate(c);
    const auto params = parameters(c);
    const auto mesh = make_mesh(c.n, c.perturb);
    auto report = ph::run_method(c.method, mesh, c.k, params);
    report.n = c.n;
    for (const auto& note : report.notes)
        std::cout << "note: " << note << '\n';
    std::cout << "method k n h dofs_condensed err_l2 err_h1\n";
    std::cout << report.method << ' ' << report.k << ' ' << report.n << ' ' << ph::format_float(report.h) << ' '
              << report.dofs_condensed << ' ' << ph::format_float(report.err_l2) << ' '
              << ph::format_float(report.err_h1) << '\n';
    for (const auto& [key, value] : report.extra)
        std::cout << key << ' ' << ph::format_float(value) << '\n';
    if (!c.out.empty())
        ph::write_vtk_solution(*mesh, report.fields, c.out);
    if (!c.dump_matrix.empty())
    {
        if (c.method == "dg")
        {
            const double gamma = params.gamma > 0.0 ? params.gamma : ph::default_dg_penalty(c.k);
            ph::write_matrix_market(ph::dg_poisson_system(ph::dg_space(mesh, c.k), gamma,
                                                          ph::poisson_case(c.case_name.empty() ? ph::default_case("dg") : c.case_name))
                                        .matrix,
                                    c.dump_matrix);
        }
        else
            ph::write_matrix_market(ph::condense(ph::hybrid_problem(c.method, mesh, c.k, params), c.threads).matrix,
                                    c.dump_matrix);
    }
    return exit_ok;
}

int cmd_convergence(const Config& c)
{
    validate(c);
    if (c.n_list.size() < 2)
        throw UsageError("--n-list needs at least two resolutions");
    for (int n : c.n_list)
        validate_n(n);
    const auto params = parameters(c);
    std::vector<ph::SolveReport> done;
    int status = exit_ok;
    std::string failure;
    for (int n : c.n_list)
    {
        try
        {
            auto r = ph::run_method(c.method, make_mesh(n, c.perturb), c.k, params);
            r.n = n;
            done.push_back(std::move(r));
        }
        catch (const std::exception& e)
        {
            status = exit_numeric;
            failure = "n = " + std::to_string(n) + ": " + e.what();
            break;
        }
    }
    std::vector<int> ns;
    for (const auto& r : done)
        ns.push_back(r.n);
    std::size_t next = 0;
    const auto rows = done.empty() ? std::vector<ph::ConvergenceRow>{}
                                   : ph::convergence_study([&](int) { return done[next++]; }, ns);
    const auto csv = ph::convergence_csv(rows);
    if (c.out.empty())
        std::cout << csv;
    else
        ph::write_text(csv, c.out);
    if (status != exit_ok)
        std::cerr << "error: " << failure << '\n';
    return status;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid polytopal finite elements on Voronoi meshes"};
    app.require_subcommand(1);

    Config mesh_cfg;
    auto* mesh_cmd = app.add_subcommand("mesh", "write a Voronoi mesh (VTK) and its JSON summary");
    auto mesh_opts = add_common(*mesh_cmd, mesh_cfg, false);
    auto* mesh_n = mesh_cmd->add_option("--n", mesh_cfg.n, "grid resolution (n >= 2)");

    Config solve_cfg;
    auto* solve_cmd = app.add_subcommand("solve", "solve one problem and print its errors");
    auto solve_opts = add_common(*solve_cmd, solve_cfg, true);
    auto* solve_n = solve_cmd->add_option("--n", solve_cfg.n, "grid resolution (n >= 2)");
    solve_cmd->add_option("--dump-matrix", solve_cfg.dump_matrix, "write the global matrix (Matrix Market)");

    Config conv_cfg;
    auto* conv_cmd = app.add_subcommand("convergence", "convergence table over several resolutions (CSV)");
    auto conv_opts = add_common(*conv_cmd, conv_cfg, true);
    auto* conv_list = conv_cmd->add_option("--n-list", conv_cfg.n_list, "resolutions, e.g. 8,16,32")->delimiter(',');

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*mesh_cmd)
        {
            apply_config(mesh_cfg, mesh_opts, mesh_n, nullptr);
            return cmd_mesh(mesh_cfg);
        }
        if (*solve_cmd)
        {
            apply_config(solve_cfg, solve_opts, solve_n, nullptr);
            return cmd_solve(solve_cfg);
        }
        apply_config(conv_cfg, conv_opts, nullptr, conv_list);
        return cmd_convergence(conv_cfg);
    }
    catch (const UsageError& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const ph::Error& e)
    {
        std::cerr << "error [" << ph::to_string(e.code()) << "]: " << e.what() << '\n';
        return e.code() == ph::ErrorCode::InvalidArgument ? exit_usage : exit_numeric;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}
