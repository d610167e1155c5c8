// Acceptance suite: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; `--criterion N` runs one. Exit status is non-zero when any
// selected criterion fails.

#include "../oracle/poly.hpp"

#include "vemcdr/assembly.hpp"
#include "vemcdr/error.hpp"
#include "vemcdr/expr.hpp"
#include "vemcdr/forms.hpp"
#include "vemcdr/harness.hpp"
#include "vemcdr/mesh.hpp"
#include "vemcdr/projectors.hpp"
#include "vemcdr/quadrature.hpp"
#include "vemcdr/space.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace vemcdr;
using oracle::Poly;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TestCell
{
    std::string name;
    std::vector<Point> vertices;
};

std::vector<TestCell> test_cells()
{
    std::vector<TestCell> cells;
    cells.push_back({"square", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
    cells.push_back({"right triangle", {{0, 0}, {1, 0}, {0, 1}}});
    cells.push_back({"perturbed quad", {{0.05, -0.02}, {1.1, 0.08}, {0.93, 1.15}, {-0.07, 0.88}}});
    std::vector<Point> hex;
    for (int i = 0; i < 6; ++i) {
        const double t = std::numbers::pi * i / 3.0;
        hex.emplace_back(0.5 + 0.5 * std::cos(t), 0.5 + 0.5 * std::sin(t));
    }
    cells.push_back({"regular hexagon", hex});
    return cells;
}

CellGeometry single_cell(const std::vector<Point>& verts)
{
    std::vector<std::size_t> ids(verts.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = i;
    const PolyMesh mesh(verts, {ids});
    return cell_geometry(mesh, 0);
}

ScalarField field(const Poly& p)
{
    return [p](const Point& x) { return p(x); };
}

Eigen::VectorXd dofs_of(const CellGeometry& g, int k, const Poly& p)
{
    return local_dofs(g, k, field(p), 2 * k + 2);
}

// points spread over the cell: vertices pulled towards the centroid and edge midpoints
std::vector<Point> sample_points(const CellGeometry& g)
{
    std::vector<Point> pts{g.centroid};
    for (const Point& v : g.vertices)
        for (double t : {0.2, 0.6, 0.9})
            pts.push_back(g.centroid + t * (v - g.centroid));
    for (const auto& e : g.edges)
        pts.push_back(g.centroid + 0.8 * (e.midpoint - g.centroid));
    return pts;
}

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

// ---- criterion 1 ------------------------------------------------------------

Outcome criterion_projector_exactness()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    double worst[4] = {0, 0, 0, 0};  // nabla, l2, grad, lap
    int tested = 0;
    for (int k = 1; k <= 3; ++k)
        for (const auto& tc : test_cells()) {
            const CellGeometry g = single_cell(tc.vertices);
            const ProjectorSet P = build_projectors(g, k);
            const ScaledMonomialBasis bk = P.basis(k);
            const ScaledMonomialBasis bg = P.basis(k - 1);
            const ScaledMonomialBasis bl = P.basis(std::max(k - 2, 0));
            const auto pts = sample_points(g);
            for (int trial = 0; trial < 200; ++trial) {
                const Poly p = oracle::random_poly(k, rng, g.centroid);
                const Eigen::VectorXd d = dofs_of(g, k, p);
                const Eigen::VectorXd pn = P.P_nabla * d, pl = P.P_l2 * d;
                const Eigen::VectorXd gx = P.P_gx * d, gy = P.P_gy * d, lp = P.L_poly * d;
                const Poly px = p.dx(), py = p.dy(), pl2 = p.lap();
                std::vector<double> ev, en, el, eg, egv, eL, eLv;
                for (const Point& x : pts) {
                    ev.push_back(p(x));
                    en.push_back(bk.eval_poly(pn, x) - p(x));
                    el.push_back(bk.eval_poly(pl, x) - p(x));
                    eg.push_back(std::hypot(bg.eval_poly(gx, x) - px(x), bg.eval_poly(gy, x) - py(x)));
                    egv.push_back(std::hypot(px(x), py(x)));
                    eL.push_back((k >= 2 ? bl.eval_poly(lp, x) : 0.0) - pl2(x));
                    eLv.push_back(pl2(x));
                }
                // a vanishing target falls back to the size of p scaled by h^-order
                const double h = g.diameter, pv = max_abs(ev);
                worst[0] = std::max(worst[0], max_abs(en) / pv);
                worst[1] = std::max(worst[1], max_abs(el) / pv);
                worst[2] = std::max(worst[2], max_abs(eg) / std::max(max_abs(egv), pv / h));
                worst[3] = std::max(worst[3], max_abs(eL) / std::max(max_abs(eLv), pv / (h * h)));
                ++tested;
            }
        }
    const double t = seconds_since(t0);
    const double w = *std::max_element(worst, worst + 4);
    return {w <= 1e-10 && t < 5.0,
            std::to_string(tested) + " polynomials; max rel err Pi_nabla " + fmt(worst[0]) + ", Pi_k " +
                fmt(worst[1]) + ", Pi_grad " + fmt(worst[2]) + ", lap " + fmt(worst[3]) + "; " + fmt(t) + " s"};
}

// ---- criterion 2 ------------------------------------------------------------

Outcome criterion_stabilizers()
{
    std::mt19937_64 rng(2);
    CoefficientSet cs;
    cs.epsilon = 1e-2;
    cs.b = [](const Point& x) { return Point(2.0 + x.x(), 1.0 - 0.5 * x.y()); };
    cs.c = [](const Point& x) { return 1.0 + x.x() * x.y(); };
    cs.div_b = [](const Point&) { return 0.5; };
    StabilizationConfig sc;
    double worst_s = 0.0, worst_sym = 0.0;
    for (int k = 1; k <= 3; ++k)
        for (const auto& tc : test_cells()) {
            const CellGeometry g = single_cell(tc.vertices);
            const ProjectorSet P = build_projectors(g, k);
            const Eigen::MatrixXd S = P.remainder();
            for (int trial = 0; trial < 50; ++trial) {
                const Eigen::VectorXd d = dofs_of(g, k, oracle::random_poly(k, rng, g.centroid));
                worst_s = std::max(worst_s, (S * d).cwiseAbs().maxCoeff() / d.cwiseAbs().maxCoeff());
            }
            const LocalForms lf = local_matrix(g, k, cs, sc, P);
            for (const Eigen::MatrixXd* m : {&lf.s_a, &lf.s_sym, &lf.s_c, &lf.s_stab})
                worst_sym = std::max(worst_sym, (*m - m->transpose()).cwiseAbs().maxCoeff());
        }
    return {worst_s <= 1e-11 && worst_sym <= 1e-13,
            "max |S dofs(p)| / |dofs(p)| = " + fmt(worst_s) + ", max stabilizer asymmetry = " + fmt(worst_sym)};
}

// ---- criterion 3 ------------------------------------------------------------

Outcome criterion_polynomial_consistency()
{
    std::mt19937_64 rng(3);
    const double eps = 1e-2, c = 1.0, delta = 0.05;
    const Point b(2.0, 1.0);
    CoefficientSet cs;
    cs.epsilon = eps;
    cs.b = [b](const Point&) { return b; };
    cs.c = [c](const Point&) { return c; };
    cs.div_b = [](const Point&) { return 0.0; };
    StabilizationConfig sc;
    double worst = 0.0;
    int pairs = 0;
    for (int k = 2; k <= 3; ++k)
        for (const auto& tc : test_cells()) {
            const CellGeometry g = single_cell(tc.vertices);
            const ProjectorSet P = build_projectors(g, k);
            const LocalForms lf = local_matrix(g, k, cs, sc, P, delta);
            for (int trial = 0; trial < 25; ++trial) {
                const Poly p = oracle::random_poly(k, rng, g.centroid);
                const Poly q = oracle::random_poly(k, rng, g.centroid);
                const double discrete = dofs_of(g, k, q).dot(lf.A * dofs_of(g, k, p));
                const double exact = oracle::continuous_form(p, q, eps, b, c, delta, tc.vertices);
                const double scale = std::sqrt(std::abs(oracle::continuous_form(p, p, eps, b, c, delta, tc.vertices)) *
                                               std::abs(oracle::continuous_form(q, q, eps, b, c, delta, tc.vertices)));
                worst = std::max(worst, std::abs(discrete - exact) / std::max(std::abs(exact), scale));
                ++pairs;
            }
        }
    return {worst <= 1e-9, std::to_string(pairs) + " polynomial pairs, max rel deviation " + fmt(worst)};
}

// ---- criterion 4 ------------------------------------------------------------

CoefficientSet convection_test_coeffs(double eps)
{
    CoefficientSet cs;
    cs.epsilon = eps;
    cs.b = [](const Point&) { return Point(2.0, 1.0); };
    cs.c = [](const Point&) { return 1.0; };
    cs.div_b = [](const Point&) { return 0.0; };
    cs.c0 = 1.0;
    return cs;
}

Outcome criterion_coercivity()
{
    const auto t0 = std::chrono::steady_clock::now();
    const PolyMesh mesh = generate_mesh(MeshKind::quad, 4, 4);
    const DofMap dofs(mesh, 2);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool ok = true;
    std::string detail;
    for (double eps : {1.0, 1e-3, 1e-6}) {
        const CoefficientSet cs = convection_test_coeffs(eps);
        const AssemblyResult asmb = assemble(mesh, dofs, cs, {});
        const SparseMatrix& A = asmb.system.original_matrix;
        double min_ratio = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(dofs.size()));
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v[i] = u(rng);
            for (std::size_t id : dofs.boundary_dofs())
                v[static_cast<Eigen::Index>(id)] = 0.0;
            const double avv = v.dot(A * v);
            const double nv = triple_norm(mesh, dofs, v, cs, asmb.cells);
            const double ratio = avv / (nv * nv);
            if (!(avv > 0.0) || !(ratio > 0.0))
                ok = false;
            min_ratio = std::min(min_ratio, ratio);
        }
        detail += "eps " + fmt(eps) + ": min A(v,v)/|||v|||^2 = " + fmt(min_ratio) + "; ";
    }
    const double t = seconds_since(t0);
    return {ok && t < 30.0, detail + fmt(t) + " s"};
}

// ---- criteria 5 and 6 -------------------------------------------------------

StudyConfig smooth_study(double eps, int k)
{
    constexpr double pi = std::numbers::pi;
    StudyConfig s;
    s.mesh.kind = MeshKind::quad;
    s.mesh.nx = s.mesh.ny = 4;
    s.levels = 4;
    s.k = k;
    s.coeffs.epsilon = eps;
    s.coeffs.b = [](const Point&) { return Point(1.0, 1.0); };
    s.coeffs.c = [](const Point&) { return 1.0; };
    s.coeffs.div_b = [](const Point&) { return 0.0; };
    s.coeffs.f = [eps](const Point& x) {
        const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
        const double cx = std::cos(pi * x.x()), cy = std::cos(pi * x.y());
        return 2.0 * eps * pi * pi * sx * sy + pi * (cx * sy + sx * cy) + sx * sy;
    };
    s.exact.u = [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
    s.exact.ux = [](const Point& x) { return pi * std::cos(pi * x.x()) * std::sin(pi * x.y()); };
    s.exact.uy = [](const Point& x) { return pi * std::sin(pi * x.x()) * std::cos(pi * x.y()); };
    return s;
}

std::string rates(const std::vector<ConvergenceRow>& rows, std::optional<double> ConvergenceRow::*member)
{
    std::string s;
    for (const auto& r : rows)
        if (r.*member)
            s += (s.empty() ? "" : " ") + fmt(*(r.*member));
    return s;
}

Outcome criterion_convergence()
{
    const auto t0 = std::chrono::steady_clock::now();
    const StudyResult diff = convergence_study(smooth_study(1.0, 2));
    const StudyResult conv = convergence_study(smooth_study(1e-6, 2));
    const double t = seconds_since(t0);
    const ConvergenceRow& d = diff.rows.back();
    const ConvergenceRow& c = conv.rows.back();
    const bool h1_ok = *d.rate_H1 >= 1.7 && *d.rate_H1 <= 2.4;
    const bool l2_ok = *d.rate_L2 >= 2.5 && *d.rate_L2 <= 3.3;
    const bool tr_ok = *c.rate_triple >= 1.5;
    return {h1_ok && l2_ok && tr_ok && t < 120.0,
            "eps 1: rate_H1 [" + rates(diff.rows, &ConvergenceRow::rate_H1) + "] " + (h1_ok ? "ok" : "out of [1.7, 2.4]") +
                ", rate_L2 [" + rates(diff.rows, &ConvergenceRow::rate_L2) + "] " +
                (l2_ok ? "ok" : "out of [2.5, 3.3]") + "; eps 1e-6: rate_triple [" +
                rates(conv.rows, &ConvergenceRow::rate_triple) + "] " + (tr_ok ? "ok" : "below 1.5") + "; " +
                fmt(t) + " s"};
}

Outcome criterion_k1_flag()
{
    try {
        const StudyResult r = convergence_study(smooth_study(1e-6, 1));
        bool finite = true;
        for (const auto& row : r.rows)
            finite = finite && std::isfinite(row.err_L2) && std::isfinite(row.err_H1) && std::isfinite(row.err_triple);
        const bool flagged = std::find(r.flags.begin(), r.flags.end(), std::string(k1_convection_flag)) != r.flags.end();
        return {finite && flagged, std::string("study completed, ") + (flagged ? "flag emitted" : "flag missing") +
                                       "; rate_triple [" + rates(r.rows, &ConvergenceRow::rate_triple) + "]"};
    } catch (const std::exception& e) {
        return {false, std::string("study failed: ") + e.what()};
    }
}

// ---- criteria 7 and 8 -------------------------------------------------------

CoefficientSet layer_coeffs(double eps)
{
    CoefficientSet cs;
    cs.epsilon = eps;
    cs.b = [](const Point&) { return Point(1.0, 0.0); };
    cs.c = [](const Point&) { return 1.0; };
    cs.div_b = [](const Point&) { return 0.0; };
    cs.f = [](const Point&) { return 1.0; };
    cs.u_b = [](const Point&) { return 0.0; };
    return cs;
}

Outcome criterion_vanishing_diffusion()
{
    const PolyMesh mesh = generate_mesh(MeshKind::quad, 32, 32);
    std::vector<double> norms;
    bool ok = true;
    std::string detail;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-9}) {
        try {
            const CoefficientSet cs = layer_coeffs(eps);
            const ProblemSolution s = solve_problem(mesh, 2, cs, {}, {});
            const bool finite = s.u.allFinite();
            const double n = triple_norm(mesh, s.dofs, s.u, cs, s.cells);
            ok = ok && finite && std::isfinite(n);
            norms.push_back(n);
            detail += "eps " + fmt(eps) + ": |||u_h||| " + fmt(n) + "; ";
        } catch (const std::exception& e) {
            ok = false;
            detail += "eps " + fmt(eps) + ": " + e.what() + "; ";
        }
    }
    if (norms.size() == 4) {
        const double ratio = *std::max_element(norms.begin(), norms.end()) /
                             *std::min_element(norms.begin(), norms.end());
        ok = ok && ratio < 10.0;
        detail += "max/min " + fmt(ratio);
    }
    return {ok, detail};
}

Outcome criterion_stabilization_effect()
{
    const PolyMesh mesh = generate_mesh(MeshKind::quad, 32, 32);
    const CoefficientSet cs = layer_coeffs(1e-6);
    const double bound = max_principle_bound(mesh, cs);
    const Box upstream{0.0, 0.9, 0.0, 1.0};
    double probe[2];
    int i = 0;
    for (DeltaMode mode : {DeltaMode::paper, DeltaMode::off}) {
        StabilizationConfig sc;
        sc.delta_mode = mode;
        const ProblemSolution s = solve_problem(mesh, 2, cs, sc, {});
        probe[i++] = oscillation_probe(mesh, s.dofs, s.u, s.cells, upstream, bound);
    }
    return {probe[0] < probe[1], "probe on x <= 0.9: delta_mode paper " + fmt(probe[0]) + ", off " + fmt(probe[1])};
}

// ---- criterion 9 ------------------------------------------------------------

Outcome criterion_infrastructure()
{
    std::vector<std::string> failures;
    std::mt19937_64 rng(9);

    // quadrature against closed-form polygon integrals
    double qerr = 0.0;
    for (const auto& tc : test_cells()) {
        const CellGeometry g = single_cell(tc.vertices);
        for (int deg = 0; deg <= 10; ++deg) {
            const Poly p = oracle::random_poly(deg, rng, g.centroid);
            const double exact = oracle::polygon_integral(p, tc.vertices);
            double scale = 0.0;
            for (const auto& [e, v] : p.c)
                scale += std::abs(v);
            const QuadRule rule = cell_rule(g, deg);
            qerr = std::max(qerr, std::abs(rule.integrate(field(p)) - exact) / std::max(std::abs(exact), g.area));
            const QuadRule edge = edge_rule(tc.vertices[0], tc.vertices[1], deg);
            const double eex = oracle::segment_integral(p, tc.vertices[0], tc.vertices[1]);
            qerr = std::max(qerr, std::abs(edge.integrate(field(p)) - eex) / std::max(std::abs(eex), 1.0));
        }
    }
    if (qerr > 1e-12)
        failures.push_back("quadrature error " + fmt(qerr));

    // mesh round trip
    bool io_ok = true;
    for (MeshKind kind : {MeshKind::tri, MeshKind::quad, MeshKind::quad_perturbed, MeshKind::hex_dominant}) {
        const PolyMesh m = generate_mesh(kind, 5, 3, kind == MeshKind::quad_perturbed ? 0.3 : 0.0, 11);
        const std::string text = write_mesh(m);
        const PolyMesh back = read_mesh(text);
        io_ok = io_ok && write_mesh(back) == text && back.cells() == m.cells();
        for (std::size_t v = 0; v < m.num_vertices() && io_ok; ++v)
            io_ok = std::memcmp(back.vertex(v).data(), m.vertex(v).data(), 2 * sizeof(double)) == 0;
    }
    if (!io_ok)
        failures.push_back("mesh round trip not bit-stable");

    // parser examples
    const auto ev = [](const char* s, double x, double y) { return expr::Expression::parse(s)(x, y); };
    bool parse_ok = ev("x*y+1", 2, 3) == 7.0 && std::abs(ev("sin(pi*x)", 0.5, 0) - 1.0) <= 1e-15 &&
                    ev("2^3^2", 0, 0) == 512.0 && ev("-x^2", 3, 0) == -9.0 &&
                    std::abs(ev("exp(x)*cos(y)", 1, 0) - std::numbers::e) <= 1e-15;
    try {
        (void)expr::Expression::parse("x+*y");
        parse_ok = false;
    } catch (const expr::SyntaxError& e) {
        parse_ok = parse_ok && e.offset() == 2;
    }
    try {
        (void)ev("log(x)", 0, 0);
        parse_ok = false;
    } catch (const expr::EvalError&) {
    }
    if (!parse_ok)
        failures.push_back("expression examples");

    // Dirichlet residual on a 2x2 mesh against the pre-elimination equations
    const PolyMesh mesh = generate_mesh(MeshKind::quad, 2, 2);
    const DofMap dofs(mesh, 2);
    CoefficientSet cs = layer_coeffs(0.1);
    cs.u_b = [](const Point& x) { return x.x() + 2.0 * x.y() * x.y(); };
    AssemblyResult asmb = assemble(mesh, dofs, cs, {});
    const DirichletData dd = dirichlet_values(mesh, dofs, cs.u_b);
    apply_dirichlet(asmb.system, dd);
    const Solution sol = solve(asmb.system);
    const Eigen::VectorXd r = asmb.system.original_matrix * sol.u - asmb.system.original_rhs;
    double res = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        if (!asmb.system.constrained.count(static_cast<std::size_t>(i)))
            res = std::max(res, std::abs(r[i]));
    res /= asmb.system.original_rhs.cwiseAbs().maxCoeff();
    bool bc_exact = true;
    for (std::size_t i = 0; i < dd.ids.size(); ++i)
        bc_exact = bc_exact && sol.u[static_cast<Eigen::Index>(dd.ids[i])] == dd.values[static_cast<Eigen::Index>(i)];
    if (!(res < 1e-10) || !bc_exact)
        failures.push_back("Dirichlet residual " + fmt(res));

    std::string detail = "quadrature " + fmt(qerr) + ", mesh I/O " + (io_ok ? "bit-stable" : "unstable") +
                         ", parser " + (parse_ok ? "ok" : "failed") + ", Dirichlet residual " + fmt(res);
    return {failures.empty(), detail};
}

struct Criterion
{
    int id;
    const char* title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "projector exactness", criterion_projector_exactness},
        {2, "stabilizer vanishing and symmetry", criterion_stabilizers},
        {3, "polynomial consistency", criterion_polynomial_consistency},
        {4, "coercivity sampling", criterion_coercivity},
        {5, "convergence order", criterion_convergence},
        {6, "k = 1 convection flag", criterion_k1_flag},
        {7, "vanishing-diffusion stability", criterion_vanishing_diffusion},
        {8, "stabilization effect", criterion_stabilization_effect},
        {9, "infrastructure exactness", criterion_infrastructure},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else {
            std::cerr << "usage: vemcdr_acceptance [--criterion N]\n";
            return 2;
        }
    }

    int failed = 0;
    for (const auto& c : all) {
        if (only && c.id != only)
            continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.title << "): " << o.detail
                  << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed ? 1 : 0;
}
