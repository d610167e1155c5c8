#include "vemcdr/projectors.hpp"

#include "vemcdr/error.hpp"
#include "vemcdr/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <sstream>
#include <tuple>

namespace vemcdr {

namespace {

constexpr double kGramConditionLimit = 1e12;

Eigen::MatrixXd solve_pivoted(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              std::size_t cell, const char* what)
{
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols())
        throw ProjectorError(std::string("singular ") + what + " system", cell);
    return qr.solve(b);
}

void check_condition(const Eigen::MatrixXd& gram, std::size_t cell, const char* what,
                     std::vector<std::string>* warnings)
{
    if (!warnings || gram.rows() == 0)
        return;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(gram).singularValues();
    const double cond = sv[0] / sv[sv.size() - 1];
    if (!(cond <= kGramConditionLimit)) {
        std::ostringstream msg;
        msg << "cell " << cell << ": " << what << " Gram matrix condition " << cond;
        warnings->push_back(msg.str());
    }
}

// int_T q v = |T| sum_g q_g dof_{cell,g}(v) for q in P^{k-2}(T)
void add_cell_pairing(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, const LocalDofLayout& lay, double area,
                      const Eigen::VectorXd& q, double sign)
{
    for (Eigen::Index g = 0; g < q.size(); ++g)
        row[lay.cell_dof(static_cast<int>(g))] += sign * area * q[g];
}

} // namespace

Eigen::MatrixXd ProjectorSet::remainder() const
{
    return Eigen::MatrixXd::Identity(D.rows(), D.rows()) - D * P_l2;
}

Eigen::VectorXd edge_pairing(const EdgeGeometry& edge, int k, const ScalarField& g)
{
    const EdgeMonomialBasis eb(edge, k - 1);
    const QuadRule rule = edge_rule(edge.start, edge.end, 2 * k - 2);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd s = eb.eval(rule.points[q]);
        m += rule.weights[q] * s * s.transpose();
        r += rule.weights[q] * g(rule.points[q]) * s;
    }
    // g = sum_j c_j s^j, and int_e s^j v = |e| dof_{e,j}(v)
    return edge.length * m.ldlt().solve(r);
}

Eigen::MatrixXd mass_matrix(const CellGeometry& cell, const ScaledMonomialBasis& basis)
{
    const QuadRule rule = cell_rule(cell, 2 * basis.degree());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd m = basis.eval(rule.points[q]);
        h.noalias() += rule.weights[q] * m * m.transpose();
    }
    return h;
}

Eigen::MatrixXd dof_matrix(const CellGeometry& cell, int k)
{
    const int np = poly_dim(k);
    const LocalDofLayout lay{k, static_cast<int>(cell.edges.size())};
    Eigen::MatrixXd d(lay.size(), np);
    for (int j = 0; j < np; ++j)
        d.col(j) = dofs_of_polynomial(cell, k, Eigen::VectorXd::Unit(np, j));
    return d;
}

Eigen::MatrixXd build_pi_nabla(const CellGeometry& cell, int k)
{
    if (k < 1)
        throw ParameterError("polynomial order k must be at least 1");
    const ScaledMonomialBasis basis = cell_basis(cell, k);
    const int np = basis.size();
    const LocalDofLayout lay{k, static_cast<int>(cell.edges.size())};
    const int nt = lay.size();

    // stiffness of the scaled monomials
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(np, np);
    const QuadRule rule = cell_rule(cell, 2 * k - 2);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::MatrixX2d gr = basis.eval_grad(rule.points[q]);
        g.noalias() += rule.weights[q] * gr * gr.transpose();
    }

    // right side: -int_T v lap(m) + int_dT v dm/dn, from DOFs only
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(np, nt);
    const Eigen::MatrixXd lap = laplacian_matrix(k, basis.scale());
    for (int a = 0; a < np; ++a) {
        if (k >= 2)
            add_cell_pairing(b.row(a), lay, cell.area, lap.col(a), -1.0);
        for (int i = 0; i < lay.n_edges; ++i) {
            const EdgeGeometry& e = cell.edges[i];
            const Eigen::VectorXd w = edge_pairing(e, k, [&](const Point& x) {
                const Point grad = basis.eval_grad(x).row(a).transpose();
                return grad.dot(e.normal);
            });
            b.row(a).segment(lay.edge_dof(i, 0), k) += w.transpose();
        }
    }

    // the constant mode is fixed by the cell average (k >= 2) or the boundary
    // average (k = 1)
    if (k >= 2) {
        const QuadRule r0 = cell_rule(cell, k);
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(np);
        for (std::size_t q = 0; q < r0.size(); ++q)
            avg += r0.weights[q] * basis.eval(r0.points[q]);
        g.row(0) = avg.transpose() / cell.area;
        b.row(0).setZero();
        b(0, lay.cell_dof(0)) = 1.0;
    } else {
        double perimeter = 0.0;
        Eigen::VectorXd avg = Eigen::VectorXd::Zero(np);
        b.row(0).setZero();
        for (int i = 0; i < lay.n_edges; ++i) {
            const EdgeGeometry& e = cell.edges[i];
            perimeter += e.length;
            const QuadRule re = edge_rule(e.start, e.end, k);
            for (std::size_t q = 0; q < re.size(); ++q)
                avg += re.weights[q] * basis.eval(re.points[q]);
            b(0, lay.edge_dof(i, 0)) = e.length;
        }
        g.row(0) = avg.transpose() / perimeter;
        b.row(0) /= perimeter;
    }
    return solve_pivoted(g, b, cell.cell_id, "elliptic projector");
}

Eigen::MatrixXd build_pi_l2(const CellGeometry& cell, int k, const Eigen::MatrixXd& pi_nabla,
                            std::vector<std::string>* warnings)
{
    const ScaledMonomialBasis basis = cell_basis(cell, k);
    const int np = basis.size();
    const LocalDofLayout lay{k, static_cast<int>(cell.edges.size())};
    if (pi_nabla.rows() != np || pi_nabla.cols() != lay.size())
        throw UsageError("elliptic projector has the wrong shape for this cell");

    const Eigen::MatrixXd h = mass_matrix(cell, basis);
    check_condition(h, cell.cell_id, "degree-k mass", warnings);

    // moments against M^{k-2} are DOFs; the top ones come from Pi_nabla
    const int nlow = poly_dim(k - 2);
    Eigen::MatrixXd c = h * pi_nabla;
    for (int a = 0; a < nlow; ++a) {
        c.row(a).setZero();
        c(a, lay.cell_dof(a)) = cell.area;
    }
    return solve_pivoted(h, c, cell.cell_id, "L2 projector");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_pi_grad(const CellGeometry& cell, int k,
                                                          std::vector<std::string>* warnings)
{
    if (k < 1)
        throw ParameterError("polynomial order k must be at least 1");
    const ScaledMonomialBasis basis = cell_basis(cell, k - 1);
    const int np = basis.size();
    const LocalDofLayout lay{k, static_cast<int>(cell.edges.size())};
    const Eigen::MatrixXd h = mass_matrix(cell, basis);
    check_condition(h, cell.cell_id, "degree-(k-1) mass", warnings);

    std::array<Eigen::MatrixXd, 2> rhs{Eigen::MatrixXd::Zero(np, lay.size()),
                                       Eigen::MatrixXd::Zero(np, lay.size())};
    for (int axis = 0; axis < 2; ++axis) {
        // int_T d_axis(v) m = -int_T v d_axis(m) + int_dT v m n_axis
        const Eigen::MatrixXd dm = derivative_matrix(k - 1, axis, basis.scale());
        for (int a = 0; a < np; ++a) {
            if (k >= 2)
                add_cell_pairing(rhs[axis].row(a), lay, cell.area, dm.col(a), -1.0);
            for (int i = 0; i < lay.n_edges; ++i) {
                const EdgeGeometry& e = cell.edges[i];
                const double n = e.normal[axis];
                if (n == 0.0)
                    continue;
                const Eigen::VectorXd w = edge_pairing(e, k, [&](const Point& x) {
                    return basis.eval(x)[a] * n;
                });
                rhs[axis].row(a).segment(lay.edge_dof(i, 0), k) += w.transpose();
            }
        }
    }
    return {solve_pivoted(h, rhs[0], cell.cell_id, "gradient projector"),
            solve_pivoted(h, rhs[1], cell.cell_id, "gradient projector")};
}

Eigen::MatrixXd laplacian_poly(const CellGeometry& cell, int k, const Eigen::MatrixXd& pi_nabla)
{
    if (k < 2)
        return Eigen::MatrixXd::Zero(1, pi_nabla.cols());
    return laplacian_matrix(k, cell.diameter) * pi_nabla;
}

ProjectorSet build_projectors(const CellGeometry& cell, int k)
{
    ProjectorSet p;
    p.k = k;
    p.cell_id = cell.cell_id;
    p.area = cell.area;
    p.diameter = cell.diameter;
    p.centroid = cell.centroid;
    p.D = dof_matrix(cell, k);
    p.P_nabla = build_pi_nabla(cell, k);
    p.P_l2 = build_pi_l2(cell, k, p.P_nabla, &p.warnings);
    std::tie(p.P_gx, p.P_gy) = build_pi_grad(cell, k, &p.warnings);
    p.L_poly = laplacian_poly(cell, k, p.P_nabla);
    p.mass = mass_matrix(cell, p.basis(k));
    return p;
}

} // namespace vemcdr
