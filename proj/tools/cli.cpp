#include "cli.hpp"

#include "vemcdr/assembly.hpp"
#include "vemcdr/config.hpp"
#include "vemcdr/error.hpp"
#include "vemcdr/harness.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace vemcdr::cli {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_numerical = 2;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err)
{
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto log = std::make_shared<spdlog::logger>("vemcdr", sink);
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::info);
    if (const char* env = std::getenv("VEMCDR_LOG")) {
        const std::string level = env;
        if (level == "error")
            log->set_level(spdlog::level::err);
        else if (level == "info")
            log->set_level(spdlog::level::info);
        else if (level == "debug")
            log->set_level(spdlog::level::debug);
        else
            log->warn("VEMCDR_LOG='{}' not recognised, using info", level);
    }
    return log;
}

// Flags shared by the subcommands that read a config.
struct Overrides
{
    std::string config;
    std::string out;
    std::optional<int> k;
    std::optional<unsigned> threads;
    std::optional<std::string> solver;
    std::optional<double> tol;
    std::optional<std::string> delta_mode;
};

void add_run_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "configuration file")->required();
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    cmd->add_option("--k", o.k, "polynomial order, 1 to 4");
    cmd->add_option("--threads", o.threads, "worker threads for assembly")->check(CLI::PositiveNumber);
    cmd->add_option("--solver", o.solver, "direct, bicgstab or gmres")
        ->check(CLI::IsMember({"direct", "bicgstab", "gmres"}));
    cmd->add_option("--tol", o.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--delta-mode", o.delta_mode, "paper, supg_classic or off")
        ->check(CLI::IsMember({"paper", "supg_classic", "off"}));
}

RunConfig load(const Overrides& o)
{
    RunConfig cfg = load_config(o.config);
    if (o.k)
        cfg.k = *o.k;
    if (o.threads)
        cfg.threads = *o.threads;
    if (o.solver)
        cfg.solver.method = parse_solver_kind(*o.solver);
    if (o.tol)
        cfg.solver.tol = *o.tol;
    if (o.delta_mode)
        cfg.stabilization.delta_mode = parse_delta_mode(*o.delta_mode);
    cfg.validate();
    return cfg;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Write>
void emit(const std::string& path, std::ostream& fallback, Write&& write)
{
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw UsageError("cannot open '" + path + "' for writing");
    write(f);
    if (!f)
        throw UsageError("write to '" + path + "' failed");
}

std::string with_suffix(const std::string& path, const std::string& suffix)
{
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

void write_matrix_block(std::ostream& out, const std::string& name, std::size_t cell, const Eigen::MatrixXd& m)
{
    out << "# cell " << cell << ' ' << name << ' ' << m.rows() << 'x' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << m(i, j);
        out << '\n';
    }
}

void print_report(std::ostream& out, const ErrorReport& r)
{
    out << "err_L2 " << r.err_L2 << '\n'
        << "err_H1 " << r.err_H1 << '\n'
        << "err_triple " << r.err_triple << '\n'
        << "  eps_part " << r.eps_part << '\n'
        << "  c0_part " << r.c0_part << '\n'
        << "  stream_part " << r.stream_part << '\n'
        << "ndof " << r.ndof << '\n'
        << "h_max " << r.h_max << '\n';
}

void print_quality(std::ostream& out, std::size_t level, const QualityReport& q)
{
    std::size_t bad = 0;
    for (bool ok : q.star_shaped_ok)
        bad += ok ? 0 : 1;
    out << "level " << level << " h_max " << q.h_max << " rho_z1 " << q.rho_z1 << " not_star_shaped " << bad
        << '\n';
}

int cmd_mesh(std::ostream& out, std::ostream& err, spdlog::logger& log, const std::string& kind, std::size_t nx, std::size_t ny,
             double perturb, std::uint64_t seed, const std::string& in, const std::string& path)
{
    const PolyMesh mesh = [&] {
        if (in.empty())
            return generate_mesh(parse_mesh_kind(kind), nx, ny, perturb, seed);
        std::ifstream f(in);
        if (!f)
            throw UsageError("mesh file not found: " + in);
        return read_mesh(f);
    }();
    const QualityReport q = quality_report(mesh);
    std::size_t bad = 0;
    for (bool ok : q.star_shaped_ok)
        bad += ok ? 0 : 1;
    std::ostream& info = path.empty() ? err : out;
    if (path.empty())
        write_mesh(out, mesh);
    else
        emit(path, out, [&](std::ostream& o) { write_mesh(o, mesh); });
    info << "vertices " << mesh.num_vertices() << '\n'
         << "cells " << mesh.num_cells() << '\n'
         << "edges " << mesh.num_edges() << '\n'
         << "boundary_edges " << mesh.boundary_edges().size() << '\n'
         << "h_max " << q.h_max << '\n'
         << "rho_z1 " << q.rho_z1 << '\n'
         << "not_star_shaped " << bad << '\n';
    if (bad)
        log.warn("{} cells are not star-shaped with respect to their centroid", bad);
    return exit_ok;
}

int cmd_solve(std::ostream& out, std::ostream& err, spdlog::logger& log, const Overrides& o)
{
    const RunConfig cfg = load(o);
    const PolyMesh mesh = cfg.build_mesh();
    const CoefficientSet coeffs = cfg.coefficients();
    log.info("solving k = {} on {} cells with {}", cfg.k, mesh.num_cells(), to_string(cfg.solver.method));

    const ProblemSolution sol =
        solve_problem(mesh, cfg.k, coeffs, cfg.stabilization, cfg.solver, cfg.threads);
    for (const auto& w : sol.warnings)
        log.debug("{}", w);
    if (!sol.warnings.empty())
        log.warn("{} assembly warnings (VEMCDR_LOG=debug lists them)", sol.warnings.size());
    log.info("ndof {} residual {:.3e} iterations {}", sol.dofs.size(), sol.stats.residual, sol.stats.iterations);

    const std::string out_path = o.out.empty() ? cfg.output : o.out;
    emit(out_path, out, [&](std::ostream& s) {
        s << std::setprecision(17) << "dof,value\n";
        for (Eigen::Index i = 0; i < sol.u.size(); ++i)
            s << i << ',' << sol.u[i] << '\n';
    });
    const auto write_cells = [&](std::ostream& s) {
        s << std::setprecision(17) << "cell,centroid_x,centroid_y,scale,monomial,px,py,coefficient\n";
        const auto exps = exponents(cfg.k);
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const ProjectorSet& p = sol.cells[c].projectors;
            const auto& ids = sol.dofs.cell_dofs(c);
            Eigen::VectorXd v(static_cast<Eigen::Index>(ids.size()));
            for (std::size_t i = 0; i < ids.size(); ++i)
                v[static_cast<Eigen::Index>(i)] = sol.u[static_cast<Eigen::Index>(ids[i])];
            const Eigen::VectorXd poly = p.P_nabla * v;
            for (Eigen::Index a = 0; a < poly.size(); ++a)
                s << c << ',' << p.centroid.x() << ',' << p.centroid.y() << ',' << p.diameter << ',' << a << ','
                  << exps[static_cast<std::size_t>(a)].a << ',' << exps[static_cast<std::size_t>(a)].b << ','
                  << poly[a] << '\n';
        }
    };
    if (out_path.empty())
        write_cells(out);
    else
        emit(with_suffix(out_path, "_cells"), out, write_cells);

    if (const auto ex = cfg.exact()) {
        const ErrorReport r = compute_errors(mesh, sol.dofs, sol.u, *ex, coeffs, sol.cells);
        std::ostream& rep = out_path.empty() ? err : out;
        print_report(rep, r);
    }
    return exit_ok;
}

int cmd_convergence(std::ostream& out, std::ostream& err, spdlog::logger& log, const Overrides& o)
{
    const RunConfig cfg = load(o);
    const StudyConfig study = cfg.study();
    log.info("convergence study: k = {}, {} levels from {}x{}", cfg.k, cfg.levels, cfg.mesh.nx, cfg.mesh.ny);
    const StudyResult res = convergence_study(study);
    for (const auto& w : res.warnings)
        log.debug("{}", w);
    if (!res.warnings.empty())
        log.warn("{} assembly warnings (VEMCDR_LOG=debug lists them)", res.warnings.size());

    const std::string out_path = o.out.empty() ? cfg.output : o.out;
    emit(out_path, out, [&](std::ostream& s) { write_csv(s, res.rows); });
    std::ostream& info = out_path.empty() ? err : out;
    for (std::size_t l = 0; l < res.quality.size(); ++l)
        print_quality(info, l + 1, res.quality[l]);
    for (const auto& f : res.flags) {
        info << "flag: " << f << '\n';
        log.warn("{}", f);
    }
    return exit_ok;
}

int cmd_project(std::ostream& out, std::ostream& err, spdlog::logger& log, const Overrides& o, std::optional<std::size_t> only)
{
    const RunConfig cfg = load(o);
    const PolyMesh mesh = cfg.build_mesh();
    if (only && *only >= mesh.num_cells())
        throw UsageError("cell " + std::to_string(*only) + " out of range (mesh has " +
                         std::to_string(mesh.num_cells()) + " cells)");
    const CoefficientSet coeffs = cfg.coefficients();
    log.info("projector dump, k = {}", cfg.k);

    emit(o.out, out, [&](std::ostream& s) {
        s << std::setprecision(17);
        const std::size_t first = only.value_or(0);
        const std::size_t last = only ? *only + 1 : mesh.num_cells();
        for (std::size_t c = first; c < last; ++c) {
            const CellGeometry g = cell_geometry(mesh, c);
            const ProjectorSet p = build_projectors(g, cfg.k);
            const LocalForms lf = local_matrix(g, cfg.k, coeffs, cfg.stabilization, p);
            s << "# cell " << c << " delta " << lf.delta << '\n';
            write_matrix_block(s, "D", c, p.D);
            write_matrix_block(s, "P_nabla", c, p.P_nabla);
            write_matrix_block(s, "P_l2", c, p.P_l2);
            write_matrix_block(s, "P_gx", c, p.P_gx);
            write_matrix_block(s, "P_gy", c, p.P_gy);
            write_matrix_block(s, "L_poly", c, p.L_poly);
            write_matrix_block(s, "a", c, lf.a);
            write_matrix_block(s, "b_sym", c, lf.b_sym);
            write_matrix_block(s, "b_skew", c, lf.b_skew);
            write_matrix_block(s, "c", c, lf.c);
            write_matrix_block(s, "b_stab", c, lf.b_stab);
            for (const auto& w : p.warnings)
                log.warn("{}", w);
        }
    });
    return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    auto log = make_logger(err);

    CLI::App app{"Virtual element solver for convection-diffusion-reaction problems", "vemcdr"};
    app.require_subcommand(1);

    std::string kind = "quad";
    std::size_t nx = 4, ny = 4;
    double perturb = 0.0;
    std::uint64_t seed = 0;
    std::string mesh_in, mesh_out;
    auto* mesh_cmd = app.add_subcommand("mesh", "generate or inspect a mesh");
    mesh_cmd->add_option("--kind", kind, "tri, quad, quad_perturbed or hex_dominant")
        ->check(CLI::IsMember({"tri", "quad", "quad_perturbed", "hex_dominant"}));
    mesh_cmd->add_option("--nx", nx)->check(CLI::PositiveNumber);
    mesh_cmd->add_option("--ny", ny)->check(CLI::PositiveNumber);
    mesh_cmd->add_option("--perturb", perturb, "vertex jitter for quad_perturbed, in [0, 0.5)");
    mesh_cmd->add_option("--seed", seed);
    mesh_cmd->add_option("--in", mesh_in, "inspect an existing mesh file instead of generating");
    mesh_cmd->add_option("--out", mesh_out, "write the mesh here");

    Overrides solve_o, conv_o, proj_o;
    auto* solve_cmd = app.add_subcommand("solve", "solve one problem");
    add_run_flags(solve_cmd, solve_o);
    auto* conv_cmd = app.add_subcommand("convergence", "run a convergence study");
    add_run_flags(conv_cmd, conv_o);
    auto* proj_cmd = app.add_subcommand("project", "dump per-cell projector and form matrices");
    add_run_flags(proj_cmd, proj_o);
    std::optional<std::size_t> cell;
    proj_cmd->add_option("--cell", cell, "dump a single cell");

    // CLI11 wants argv order, last element first
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands())
            sub = s;
        err << (sub ? sub->help() : app.help());
        return exit_usage;
    }

    try {
        if (mesh_cmd->parsed())
            return cmd_mesh(out, err, *log, kind, nx, ny, perturb, seed, mesh_in, mesh_out);
        if (solve_cmd->parsed())
            return cmd_solve(out, err, *log, solve_o);
        if (conv_cmd->parsed())
            return cmd_convergence(out, err, *log, conv_o);
        if (proj_cmd->parsed())
            return cmd_project(out, err, *log, proj_o, cell);
    } catch (const NumericalError& e) {
        log->error("{}", e.what());
        return exit_numerical;
    } catch (const Error& e) {
        log->error("{}", e.what());
        return exit_usage;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return exit_usage;
    }
    return exit_usage;
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace vemcdr::cli
