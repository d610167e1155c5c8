#include "vemcdr/harness.hpp"

#include "vemcdr/error.hpp"
#include "vemcdr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace vemcdr {

namespace {

// Compensated sum; keeps the cell-ordered reduction reproducible and accurate.
struct KahanSum
{
    double sum = 0.0;
    double carry = 0.0;

    void add(double v)
    {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

Eigen::VectorXd gather(const DofMap& dofs, std::size_t cell, const Eigen::VectorXd& u)
{
    const auto& ids = dofs.cell_dofs(cell);
    Eigen::VectorXd v(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = u[static_cast<Eigen::Index>(ids[i])];
    return v;
}

void check_inputs(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                  const std::vector<CellData>& cells)
{
    if (static_cast<std::size_t>(u_h.size()) != dofs.size())
        throw UsageError("solution vector length does not match the DOF count");
    if (cells.size() != mesh.num_cells())
        throw UsageError("cell data does not match the mesh");
}

} // namespace

ErrorReport compute_errors(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                           const ExactSolution& exact, const CoefficientSet& coeffs,
                           const std::vector<CellData>& cells)
{
    if (!exact.u || !exact.ux || !exact.uy)
        throw UsageError("error evaluation needs the exact solution and both partial derivatives");
    check_inputs(mesh, dofs, u_h, cells);
    const int k = dofs.k();

    KahanSum l2, h1, stream;
    double h_max = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const CellData& d = cells[c];
        const ProjectorSet& p = d.projectors;
        const Eigen::VectorXd v = gather(dofs, c, u_h);
        const Eigen::VectorXd pi = p.P_l2 * v;
        const Eigen::VectorXd pn = p.P_nabla * v;
        const Eigen::VectorXd gx = p.P_gx * v;
        const Eigen::VectorXd gy = p.P_gy * v;
        const ScaledMonomialBasis bk = p.basis(k);
        const ScaledMonomialBasis bg = p.basis(k - 1);
        const QuadRule rule = cell_rule(d.geometry, 2 * k + 4);

        double el2 = 0.0, eh1 = 0.0, es = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point& x = rule.points[q];
            const double w = rule.weights[q];
            const Point grad_u(exact.ux(x), exact.uy(x));
            const double e0 = exact.u(x) - bk.eval_poly(pi, x);
            const Point e1 = grad_u - bk.eval_poly_grad(pn, x);
            const Point gh(bg.eval_poly(gx, x), bg.eval_poly(gy, x));
            const double es_q = coeffs.b(x).dot(grad_u - gh);
            el2 += w * e0 * e0;
            eh1 += w * e1.squaredNorm();
            es += w * es_q * es_q;
        }
        l2.add(el2);
        h1.add(eh1);
        stream.add(d.delta * es);
        h_max = std::max(h_max, d.geometry.diameter);
    }

    ErrorReport r;
    r.err_L2 = std::sqrt(l2.sum);
    r.err_H1 = std::sqrt(h1.sum);
    r.eps_part = coeffs.epsilon * h1.sum;
    r.c0_part = coeffs.c0 * l2.sum;
    r.stream_part = stream.sum;
    r.err_triple = std::sqrt(r.eps_part + r.c0_part + r.stream_part);
    r.ndof = dofs.size();
    r.h_max = h_max;
    return r;
}

double triple_norm(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                   const CoefficientSet& coeffs, const std::vector<CellData>& cells)
{
    const ScalarField zero = [](const Point&) { return 0.0; };
    return compute_errors(mesh, dofs, u_h, {zero, zero, zero}, coeffs, cells).err_triple;
}

ProblemSolution solve_problem(const PolyMesh& mesh, int k, const CoefficientSet& coeffs,
                              const StabilizationConfig& config, const SolveOptions& solver,
                              unsigned threads)
{
    ProblemSolution out{DofMap(mesh, k), {}, {}, {}, {}};
    AssemblyResult asmb = assemble(mesh, out.dofs, coeffs, config, {threads});
    apply_dirichlet(asmb.system, dirichlet_values(mesh, out.dofs, coeffs.u_b));
    Solution s = solve(asmb.system, solver);
    out.cells = std::move(asmb.cells);
    out.u = std::move(s.u);
    out.stats = s.stats;
    out.warnings = std::move(asmb.warnings);
    return out;
}

bool convection_dominated(const PolyMesh& mesh, const CoefficientSet& coeffs)
{
    double peclet = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(mesh, c);
        for (const Point& v : g.vertices)
            peclet = std::max(peclet, coeffs.b(v).norm() * g.diameter / (2.0 * coeffs.epsilon));
        peclet = std::max(peclet, coeffs.b(g.centroid).norm() * g.diameter / (2.0 * coeffs.epsilon));
    }
    return peclet > 1.0;
}

double observed_rate(double err_coarse, double err_fine, double h_coarse, double h_fine)
{
    return std::log(err_coarse / err_fine) / std::log(h_coarse / h_fine);
}

StudyResult convergence_study(const StudyConfig& cfg)
{
    if (cfg.k < 1 || cfg.k > 4)
        throw ParameterError("polynomial order k must lie in [1, 4]");
    if (cfg.levels < 1 || cfg.levels > 8)
        throw ParameterError("number of levels must lie in [1, 8]");
    if (!cfg.exact.u || !cfg.exact.ux || !cfg.exact.uy)
        throw UsageError("a convergence study needs the exact solution and its gradient");

    StudyResult res;
    bool flagged = false;
    for (int level = 0; level < cfg.levels; ++level) {
        const std::size_t scale = std::size_t(1) << level;
        const PolyMesh mesh = generate_mesh(cfg.mesh.kind, cfg.mesh.nx * scale, cfg.mesh.ny * scale,
                                            cfg.mesh.perturb, cfg.mesh.seed);
        res.quality.push_back(quality_report(mesh));

        ProblemSolution sol = [&] {
            try {
                return solve_problem(mesh, cfg.k, cfg.coeffs, cfg.stabilization, cfg.solver, cfg.threads);
            } catch (const NonConvergenceError& e) {
                throw NonConvergenceError("level " + std::to_string(level + 1) + ": " + e.what(),
                                          e.best_residual(), e.iterations());
            } catch (const NumericalError& e) {
                throw SolverError("level " + std::to_string(level + 1) + ": " + e.what());
            }
        }();
        for (auto& w : sol.warnings)
            res.warnings.push_back("level " + std::to_string(level + 1) + ": " + w);

        const ErrorReport rep = compute_errors(mesh, sol.dofs, sol.u, cfg.exact, cfg.coeffs, sol.cells);
        res.reports.push_back(rep);

        ConvergenceRow row;
        row.level = level + 1;
        row.h_max = rep.h_max;
        row.ndof = rep.ndof;
        row.err_L2 = rep.err_L2;
        row.err_H1 = rep.err_H1;
        row.err_triple = rep.err_triple;
        if (!res.rows.empty()) {
            const ConvergenceRow& prev = res.rows.back();
            row.rate_L2 = observed_rate(prev.err_L2, row.err_L2, prev.h_max, row.h_max);
            row.rate_H1 = observed_rate(prev.err_H1, row.err_H1, prev.h_max, row.h_max);
            row.rate_triple = observed_rate(prev.err_triple, row.err_triple, prev.h_max, row.h_max);
        }
        res.rows.push_back(row);

        if (cfg.k == 1 && !flagged && convection_dominated(mesh, cfg.coeffs)) {
            res.flags.emplace_back(k1_convection_flag);
            flagged = true;
        }
    }
    return res;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17);
    s << csv_header << '\n';
    auto opt = [&](const std::optional<double>& v) {
        if (v)
            s << *v;
    };
    for (const auto& r : rows) {
        s << r.level << ',' << r.h_max << ',' << r.ndof << ',' << r.err_L2 << ',' << r.err_H1 << ','
          << r.err_triple << ',';
        opt(r.rate_L2);
        s << ',';
        opt(r.rate_H1);
        s << ',';
        opt(r.rate_triple);
        s << '\n';
    }
    out << s.str();
}

std::string write_csv(const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream s;
    write_csv(s, rows);
    return s.str();
}

double max_principle_bound(const PolyMesh& mesh, const CoefficientSet& coeffs, int quad_degree)
{
    double bound = 0.0;
    for (std::size_t e : mesh.boundary_edges()) {
        const EdgeGeometry g = edge_geometry(mesh, e);
        bound = std::max({bound, std::abs(coeffs.u_b(g.start)), std::abs(coeffs.u_b(g.end))});
        const QuadRule rule = edge_rule(g.start, g.end, quad_degree);
        for (const Point& x : rule.points)
            bound = std::max(bound, std::abs(coeffs.u_b(x)));
    }

    double c_min = std::numeric_limits<double>::infinity();
    double f_max = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(mesh, c);
        const QuadRule rule = cell_rule(g, quad_degree);
        for (const Point& x : rule.points) {
            c_min = std::min(c_min, coeffs.c(x));
            f_max = std::max(f_max, std::abs(coeffs.f(x)));
        }
    }
    if (c_min > 0.0)
        bound = std::max(bound, f_max / c_min);
    return bound;
}

double oscillation_probe(const PolyMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u_h,
                         const std::vector<CellData>& cells, const Box& region, double bound)
{
    if (!(region.xmin <= region.xmax) || !(region.ymin <= region.ymax))
        throw ParameterError("probe region has inverted bounds");
    check_inputs(mesh, dofs, u_h, cells);
    const int k = dofs.k();

    double peak = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const CellData& d = cells[c];
        const Eigen::VectorXd pn = d.projectors.P_nabla * gather(dofs, c, u_h);
        const ScaledMonomialBasis basis = d.projectors.basis(k);
        const QuadRule rule = cell_rule(d.geometry, 2 * k + 2);
        for (const Point& x : rule.points) {
            if (!region.contains(x))
                continue;
            any = true;
            const double v = std::abs(basis.eval_poly(pn, x));
            if (!std::isfinite(v))
                return std::numeric_limits<double>::quiet_NaN();
            peak = std::max(peak, v);
        }
    }
    if (!any)
        throw ParameterError("probe region contains no quadrature points");
    return peak - bound;
}

} // namespace vemcdr
