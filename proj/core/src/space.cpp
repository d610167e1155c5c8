#include "vemcdr/space.hpp"

#include "vemcdr/error.hpp"
#include "vemcdr/quadrature.hpp"

#include <algorithm>

namespace vemcdr {

std::size_t local_dof_count(std::size_t n_edges, int k)
{
    if (k < 1)
        throw ParameterError("polynomial order k must be at least 1");
    if (n_edges < 3)
        throw ParameterError("a polygon has at least 3 edges");
    return n_edges * std::size_t(k) + std::size_t((k - 1) * k / 2);
}

DofMap::DofMap(const PolyMesh& mesh, int k)
    : k_(k), n_edges_(mesh.num_edges())
{
    if (k < 1)
        throw ParameterError("polynomial order k must be at least 1");
    const int ncell = k * (k - 1) / 2;
    size_ = n_edges_ * std::size_t(k) + mesh.num_cells() * std::size_t(ncell);

    cell_dofs_.resize(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        auto& ids = cell_dofs_[c];
        const auto& edges = mesh.cell_edges(c);
        ids.reserve(edges.size() * std::size_t(k) + std::size_t(ncell));
        for (std::size_t e : edges)
            for (int j = 0; j < k; ++j)
                ids.push_back(edge_dof(e, j));
        for (int a = 0; a < ncell; ++a)
            ids.push_back(cell_dof(c, a));
    }
    for (std::size_t e : mesh.boundary_edges())
        for (int j = 0; j < k; ++j)
            boundary_dofs_.push_back(edge_dof(e, j));
    std::sort(boundary_dofs_.begin(), boundary_dofs_.end());
}

LocalDofLayout DofMap::layout(std::size_t cell) const
{
    const int ncell = k_ * (k_ - 1) / 2;
    const int n = static_cast<int>(cell_dofs_.at(cell).size()) - ncell;
    return LocalDofLayout{k_, n / k_};
}

DofMap build_dof_map(const PolyMesh& mesh, int k)
{
    return DofMap(mesh, k);
}

ScaledMonomialBasis cell_basis(const CellGeometry& cell, int degree)
{
    return ScaledMonomialBasis(cell.centroid, cell.diameter, std::max(degree, 0));
}

Eigen::VectorXd edge_moments(const EdgeGeometry& edge, int k, const ScalarField& f, int quad_degree)
{
    const EdgeMonomialBasis eb(edge, k - 1);
    const QuadRule rule = edge_rule(edge.start, edge.end, quad_degree);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(k);
    for (std::size_t q = 0; q < rule.size(); ++q)
        mom += rule.weights[q] * f(rule.points[q]) * eb.eval(rule.points[q]);
    return mom / edge.length;
}

Eigen::VectorXd cell_moments(const CellGeometry& cell, int k, const ScalarField& f, int quad_degree)
{
    const int n = poly_dim(k - 2);
    if (n == 0)
        return Eigen::VectorXd(0);
    const ScaledMonomialBasis mb = cell_basis(cell, k - 2);
    const QuadRule rule = cell_rule(cell, quad_degree);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(n);
    for (std::size_t q = 0; q < rule.size(); ++q)
        mom += rule.weights[q] * f(rule.points[q]) * mb.eval(rule.points[q]);
    return mom / cell.area;
}

Eigen::VectorXd local_dofs(const CellGeometry& cell, int k, const ScalarField& f, int quad_degree)
{
    const LocalDofLayout lay{k, static_cast<int>(cell.edges.size())};
    Eigen::VectorXd d(lay.size());
    for (int i = 0; i < lay.n_edges; ++i)
        d.segment(lay.edge_dof(i, 0), k) = edge_moments(cell.edges[i], k, f, quad_degree);
    if (lay.cell_dofs() > 0)
        d.tail(lay.cell_dofs()) = cell_moments(cell, k, f, quad_degree);
    return d;
}

Eigen::VectorXd dofs_of_polynomial(const CellGeometry& cell, int k, const Eigen::VectorXd& coeffs)
{
    const int deg = degree_of(coeffs.size());
    const ScaledMonomialBasis b = cell_basis(cell, deg);
    return local_dofs(cell, k, [&](const Point& x) { return b.eval_poly(coeffs, x); }, deg + k);
}

Eigen::VectorXd interpolate_dofs(const PolyMesh& mesh, const DofMap& dofs, const ScalarField& f,
                                 int quad_degree)
{
    const int k = dofs.k();
    if (quad_degree < 0)
        quad_degree = 2 * k + 6;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs.size());
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
        u.segment(dofs.edge_dof(e, 0), k) = edge_moments(edge_geometry(mesh, e), k, f, quad_degree);
    if (k >= 2)
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const Eigen::VectorXd m = cell_moments(cell_geometry(mesh, c), k, f, quad_degree);
            u.segment(dofs.cell_dof(c, 0), m.size()) = m;
        }
    return u;
}

DirichletData dirichlet_values(const PolyMesh& mesh, const DofMap& dofs, const ScalarField& u_b,
                               int quad_degree)
{
    const int k = dofs.k();
    if (quad_degree < 0)
        quad_degree = 2 * k + 6;
    DirichletData d;
    d.ids.reserve(mesh.boundary_edges().size() * std::size_t(k));
    std::vector<double> vals;
    for (std::size_t e : mesh.boundary_edges()) {
        const Eigen::VectorXd m = edge_moments(edge_geometry(mesh, e), k, u_b, quad_degree);
        for (int j = 0; j < k; ++j) {
            d.ids.push_back(dofs.edge_dof(e, j));
            vals.push_back(m[j]);
        }
    }
    d.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return d;
}

} // namespace vemcdr
