#pragma once

#include "vemcdr/basis.hpp"
#include "vemcdr/mesh.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <vector>

namespace vemcdr {

using ScalarField = std::function<double(const Point&)>;

/// Local numbering on one cell: k moments per edge (edge-major, in the cell's
/// edge order), then the k(k-1)/2 cell moments in graded-lex order.
struct LocalDofLayout
{
    int k = 1;
    int n_edges = 3;

    int edge_dofs() const noexcept { return k; }
    int cell_dofs() const noexcept { return k * (k - 1) / 2; }
    int size() const noexcept { return n_edges * k + cell_dofs(); }
    int edge_dof(int local_edge, int order) const noexcept { return local_edge * k + order; }
    int cell_dof(int alpha) const noexcept { return n_edges * k + alpha; }
};

std::size_t local_dof_count(std::size_t n_edges, int k);

/// Global numbering: all edge moments (edge-major, order-minor), then all
/// cell moments. Interior edges carry one set of moments shared by both
/// neighbours, which is the patch test of order k built into the numbering.
class DofMap
{
public:
    DofMap(const PolyMesh& mesh, int k);

    int k() const noexcept { return k_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t num_edge_dofs() const noexcept { return n_edges_ * std::size_t(k_); }
    std::size_t edge_dof(std::size_t edge, int order) const noexcept
    {
        return edge * std::size_t(k_) + std::size_t(order);
    }
    std::size_t cell_dof(std::size_t cell, int alpha) const noexcept
    {
        return num_edge_dofs() + cell * std::size_t(k_ * (k_ - 1) / 2) + std::size_t(alpha);
    }
    LocalDofLayout layout(std::size_t cell) const;
    /// local -> global ids for one cell
    const std::vector<std::size_t>& cell_dofs(std::size_t cell) const { return cell_dofs_.at(cell); }
    const std::vector<std::size_t>& boundary_dofs() const noexcept { return boundary_dofs_; }

private:
    int k_;
    std::size_t n_edges_;
    std::size_t size_;
    std::vector<std::vector<std::size_t>> cell_dofs_;
    std::vector<std::size_t> boundary_dofs_;
};

DofMap build_dof_map(const PolyMesh& mesh, int k);

/// Scaled monomial basis centred at the cell centroid with scale h_T.
ScaledMonomialBasis cell_basis(const CellGeometry& cell, int degree);

/// (1/|e|) int_e f m ds for m in M^{k-1}(e).
Eigen::VectorXd edge_moments(const EdgeGeometry& edge, int k, const ScalarField& f, int quad_degree);

/// (1/|T|) int_T f m dx for m in M^{k-2}(T).
Eigen::VectorXd cell_moments(const CellGeometry& cell, int k, const ScalarField& f, int quad_degree);

/// Local DOF vector of an arbitrary function.
Eigen::VectorXd local_dofs(const CellGeometry& cell, int k, const ScalarField& f, int quad_degree);

/// Local DOF vector of the polynomial sum_i coeffs[i] m_i in cell_basis(cell, deg).
Eigen::VectorXd dofs_of_polynomial(const CellGeometry& cell, int k, const Eigen::VectorXd& coeffs);

/// DOF interpolant: every global DOF is the corresponding moment of f.
Eigen::VectorXd interpolate_dofs(const PolyMesh& mesh, const DofMap& dofs, const ScalarField& f,
                                 int quad_degree = -1);

struct DirichletData
{
    std::vector<std::size_t> ids;
    Eigen::VectorXd values;
};

/// Boundary edge moments of u_b.
DirichletData dirichlet_values(const PolyMesh& mesh, const DofMap& dofs, const ScalarField& u_b,
                               int quad_degree = -1);

} // namespace vemcdr
