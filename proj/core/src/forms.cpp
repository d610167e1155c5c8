#include "vemcdr/forms.hpp"

#include "vemcdr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vemcdr {

DeltaMode parse_delta_mode(std::string_view name)
{
    if (name == "paper") return DeltaMode::paper;
    if (name == "supg_classic") return DeltaMode::supg_classic;
    if (name == "off") return DeltaMode::off;
    throw ParameterError("unknown delta mode '" + std::string(name) + "'");
}

std::string to_string(DeltaMode mode)
{
    switch (mode) {
    case DeltaMode::paper: return "paper";
    case DeltaMode::supg_classic: return "supg_classic";
    case DeltaMode::off: return "off";
    }
    return "unknown";
}

void StabilizationConfig::validate() const
{
    const double vals[] = {mu1, mu2, c_I, alpha_star, gamma_star, s_star,
                           stab_scale_a, stab_scale_c, stab_scale_sym, stab_scale_supg};
    for (double v : vals)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ParameterError("stabilization constants must be positive and finite");
}

int assembly_degree(int k)
{
    return 2 * k + 2;
}

double divergence(const CoefficientSet& coeffs, const Point& x, double h)
{
    if (coeffs.div_b)
        return (*coeffs.div_b)(x);
    const double s = 1e-6 * h;
    const double dbx = coeffs.b(x + Point(s, 0.0)).x() - coeffs.b(x - Point(s, 0.0)).x();
    const double dby = coeffs.b(x + Point(0.0, s)).y() - coeffs.b(x - Point(0.0, s)).y();
    return (dbx + dby) / (2.0 * s);
}

CellSamples sample_coefficients(const CellGeometry& cell, int k, const CoefficientSet& coeffs)
{
    CellSamples s;
    s.rule = cell_rule(cell, assembly_degree(k));
    const std::size_t nq = s.rule.size();
    s.b.reserve(nq);
    s.c.reserve(nq);
    s.div_b.reserve(nq);
    s.coercivity_min = std::numeric_limits<double>::infinity();
    double div_int = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
        const Point& x = s.rule.points[q];
        s.b.push_back(coeffs.b(x));
        s.c.push_back(coeffs.c(x));
        s.div_b.push_back(divergence(coeffs, x, cell.diameter));
        s.c_max = std::max(s.c_max, std::abs(s.c.back()));
        s.b_max = std::max(s.b_max, s.b.back().norm());
        s.coercivity_min = std::min(s.coercivity_min, s.c.back() - 0.5 * s.div_b.back());
        div_int += s.rule.weights[q] * s.div_b.back();
    }
    s.div_b_mean = div_int / cell.area;
    return s;
}

double compute_delta(double h_T, double epsilon, double c0, double c_max, double b_max,
                     const StabilizationConfig& config)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double h2 = h_T * h_T;
    double delta = 0.0;
    switch (config.delta_mode) {
    case DeltaMode::off:
        return 0.0;
    case DeltaMode::paper: {
        const double smin = std::min(config.s_star, config.gamma_star);
        const double reaction = c_max > 0.0 ? c0 * smin / (4.0 * c_max * c_max) : inf;
        const double diffusion = epsilon > 0.0
                                     ? h2 * config.alpha_star / (2.0 * epsilon * config.mu1 * config.mu1)
                                     : inf;
        const double convection = b_max > 0.0
                                      ? std::min(1.0, 1.0 / config.c_I) * c0 * smin * h2
                                            / (4.0 * b_max * b_max * config.mu2 * config.mu2)
                                      : inf;
        delta = std::min({reaction, diffusion, convection});
        break;
    }
    case DeltaMode::supg_classic: {
        const double adv = b_max > 0.0 ? h_T / (2.0 * b_max) : inf;
        const double diff = epsilon > 0.0 ? h2 / (4.0 * epsilon) : inf;
        delta = std::min(adv, diff);
        break;
    }
    }
    if (epsilon > 0.0)
        delta = std::min(delta, h2 / epsilon);
    return std::isfinite(delta) ? delta : 0.0;
}

double compute_delta(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                     const StabilizationConfig& config)
{
    const CellSamples s = sample_coefficients(cell, k, coeffs);
    return compute_delta(cell.diameter, coeffs.epsilon, coeffs.c0, s.c_max, s.b_max, config);
}

namespace {

// Projected basis quantities at the quadrature points, one row per point.
struct PointValues
{
    Eigen::MatrixXd pi;    // Pi_k phi_j
    Eigen::MatrixXd gx;    // x-component of Pi_{k-1} grad phi_j
    Eigen::MatrixXd gy;
    Eigen::MatrixXd lap;   // lap Pi_nabla phi_j
    Eigen::MatrixXd bg;    // b . Pi_{k-1} grad phi_j
    Eigen::VectorXd w;
};

PointValues point_values(int k, const ProjectorSet& proj, const CellSamples& s)
{
    const ScaledMonomialBasis bk = proj.basis(k);
    const ScaledMonomialBasis bk1 = proj.basis(k - 1);
    const ScaledMonomialBasis bk2 = proj.basis(std::max(k - 2, 0));
    const Eigen::Index nq = static_cast<Eigen::Index>(s.rule.size());
    const Eigen::Index nt = proj.num_dofs();
    PointValues v;
    v.pi.resize(nq, nt);
    v.gx.resize(nq, nt);
    v.gy.resize(nq, nt);
    v.lap.resize(nq, nt);
    v.w.resize(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
        const Point& x = s.rule.points[q];
        v.pi.row(q) = bk.eval(x).transpose() * proj.P_l2;
        const Eigen::RowVectorXd m1 = bk1.eval(x).transpose();
        v.gx.row(q) = m1 * proj.P_gx;
        v.gy.row(q) = m1 * proj.P_gy;
        v.lap.row(q) = bk2.eval(x).transpose() * proj.L_poly;
        v.w[q] = s.rule.weights[q];
    }
    v.bg.resize(nq, nt);
    for (Eigen::Index q = 0; q < nq; ++q)
        v.bg.row(q) = s.b[q].x() * v.gx.row(q) + s.b[q].y() * v.gy.row(q);
    return v;
}

Eigen::VectorXd as_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

LocalForms local_matrix(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                        const StabilizationConfig& config, const ProjectorSet& proj)
{
    const CellSamples s = sample_coefficients(cell, k, coeffs);
    const double delta = compute_delta(cell.diameter, coeffs.epsilon, coeffs.c0, s.c_max, s.b_max, config);
    return local_matrix(cell, k, coeffs, config, proj, delta);
}

LocalForms local_matrix(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                        const StabilizationConfig& config, const ProjectorSet& proj, double delta)
{
    if (proj.k != k || proj.cell_id != cell.cell_id || proj.P_l2.size() == 0)
        throw UsageError("projectors not built for cell " + std::to_string(cell.cell_id));

    const CellSamples s = sample_coefficients(cell, k, coeffs);
    const PointValues v = point_values(k, proj, s);
    const double eps = coeffs.epsilon;

    LocalForms out;
    out.delta = delta;
    if (s.coercivity_min < coeffs.c0 - 1e-10) {
        std::ostringstream msg;
        msg << "cell " << cell.cell_id << ": c - div(b)/2 = " << s.coercivity_min
            << " falls below c0 = " << coeffs.c0;
        out.warnings.push_back(msg.str());
    }

    const Eigen::MatrixXd rem = proj.remainder();
    Eigen::MatrixXd sts = rem.transpose() * rem;
    sts = 0.5 * (sts + sts.transpose()).eval();  // blocked products are not bit-symmetric
    const Eigen::VectorXd w = v.w;
    const Eigen::VectorXd wc = w.cwiseProduct(as_vector(s.c));
    const Eigen::VectorXd wdiv = w.cwiseProduct(as_vector(s.div_b));

    out.s_a = config.stab_scale_a * eps * sts;
    out.s_sym = config.stab_scale_sym * 0.5 * s.div_b_mean * cell.area * sts;
    out.s_c = config.stab_scale_c * s.c_max * cell.area * sts;
    out.s_stab = config.stab_scale_supg * delta * s.b_max * s.b_max * sts;

    out.a = eps * (v.gx.transpose() * w.asDiagonal() * v.gx + v.gy.transpose() * w.asDiagonal() * v.gy)
            + out.s_a;
    out.b_sym = 0.5 * v.pi.transpose() * wdiv.asDiagonal() * v.pi + out.s_sym;
    const Eigen::MatrixXd cross = v.pi.transpose() * w.asDiagonal() * v.bg;
    out.b_skew = 0.5 * (cross - cross.transpose());
    out.c = v.pi.transpose() * wc.asDiagonal() * v.pi + out.s_c;

    // residual part: (-eps lap u + c Pi u) tested with delta b.grad v
    Eigen::MatrixXd residual(v.pi.rows(), v.pi.cols());
    for (Eigen::Index q = 0; q < v.pi.rows(); ++q)
        residual.row(q) = -eps * v.lap.row(q) + s.c[q] * v.pi.row(q);
    out.b_stab = delta * (v.bg.transpose() * w.asDiagonal() * residual)
                 + delta * (v.bg.transpose() * w.asDiagonal() * v.bg) + out.s_stab;

    out.A = out.a - out.b_sym + out.b_skew + out.c + out.b_stab;
    out.F = local_rhs(cell, k, coeffs, proj, delta);
    return out;
}

Eigen::VectorXd project_source(const CellGeometry& cell, const ScalarField& f, int degree,
                               int quad_degree)
{
    const ScaledMonomialBasis b = cell_basis(cell, degree);
    const QuadRule rule = cell_rule(cell, quad_degree);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(b.size(), b.size());
    Eigen::VectorXd r = Eigen::VectorXd::Zero(b.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd m = b.eval(rule.points[q]);
        h.noalias() += rule.weights[q] * m * m.transpose();
        r += rule.weights[q] * f(rule.points[q]) * m;
    }
    return h.ldlt().solve(r);
}

Eigen::VectorXd local_rhs(const CellGeometry& cell, int k, const CoefficientSet& coeffs,
                          const ProjectorSet& proj, double delta)
{
    const int fdeg = std::max(k - 2, 0);
    const LocalDofLayout lay{k, static_cast<int>(cell.edges.size())};
    const Eigen::VectorXd fh = project_source(cell, coeffs.f, fdeg, assembly_degree(k));
    const ScaledMonomialBasis bf = cell_basis(cell, fdeg);

    Eigen::VectorXd F = Eigen::VectorXd::Zero(lay.size());
    if (k >= 2) {
        // int_T f_h v is a combination of the cell moments of v
        for (Eigen::Index g = 0; g < fh.size(); ++g)
            F[lay.cell_dof(static_cast<int>(g))] += cell.area * fh[g];
    }

    const bool need_quad = k == 1 || delta != 0.0;
    if (!need_quad)
        return F;
    const CellSamples s = sample_coefficients(cell, k, coeffs);
    const PointValues v = point_values(k, proj, s);
    const ScaledMonomialBasis bk = proj.basis(k);
    for (Eigen::Index q = 0; q < v.w.size(); ++q) {
        const double fq = bf.eval_poly(fh, s.rule.points[q]);
        if (k == 1) {
            // no cell moments: pair the constant f_h with Pi_nabla v
            F += v.w[q] * fq * (bk.eval(s.rule.points[q]).transpose() * proj.P_nabla).transpose();
        }
        if (delta != 0.0)
            F += v.w[q] * fq * delta * v.bg.row(q).transpose();
    }
    return F;
}

} // namespace vemcdr
