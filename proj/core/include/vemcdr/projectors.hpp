#pragma once

#include "vemcdr/basis.hpp"
#include "vemcdr/mesh.hpp"
#include "vemcdr/space.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace vemcdr {

/// Per-cell polynomial projections of the local virtual space, as matrices
/// acting on local DOF vectors. Polynomial coefficients refer to
/// cell_basis(cell, degree) in graded-lex order.
struct ProjectorSet
{
    int k = 1;
    std::size_t cell_id = 0;
    double area = 0.0;
    double diameter = 0.0;
    Point centroid = Point::Zero();

    Eigen::MatrixXd D;        ///< n_T x dim P^k, D(i, j) = dof_i(m_j)
    Eigen::MatrixXd P_nabla;  ///< dim P^k x n_T, elliptic projector
    Eigen::MatrixXd P_l2;     ///< dim P^k x n_T, L2 projector (top moments via P_nabla)
    Eigen::MatrixXd P_gx;     ///< dim P^{k-1} x n_T, x-component of Pi_{k-1} grad
    Eigen::MatrixXd P_gy;     ///< dim P^{k-1} x n_T, y-component of Pi_{k-1} grad
    Eigen::MatrixXd L_poly;   ///< dim P^{max(k-2,0)} x n_T, Laplacian of P_nabla (zero for k = 1)
    Eigen::MatrixXd mass;     ///< dim P^k Gram matrix of the scaled monomials

    std::vector<std::string> warnings;

    int num_dofs() const noexcept { return static_cast<int>(D.rows()); }
    ScaledMonomialBasis basis(int degree) const { return {centroid, diameter, degree}; }

    /// I - D P_l2: the part of a DOF vector not explained by Pi_k. Vanishes
    /// on DOF vectors of P^k polynomials.
    Eigen::MatrixXd remainder() const;
};

/// Weights w with int_e g v ds = sum_j w_j dof_{e,j}(v) for g in P^{k-1}(e).
Eigen::VectorXd edge_pairing(const EdgeGeometry& edge, int k, const ScalarField& g);

/// Gram matrix int_T m_a m_b over the scaled monomials of the given basis.
Eigen::MatrixXd mass_matrix(const CellGeometry& cell, const ScaledMonomialBasis& basis);

Eigen::MatrixXd dof_matrix(const CellGeometry& cell, int k);
Eigen::MatrixXd build_pi_nabla(const CellGeometry& cell, int k);
Eigen::MatrixXd build_pi_l2(const CellGeometry& cell, int k, const Eigen::MatrixXd& pi_nabla,
                            std::vector<std::string>* warnings = nullptr);
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_pi_grad(const CellGeometry& cell, int k,
                                                          std::vector<std::string>* warnings = nullptr);
Eigen::MatrixXd laplacian_poly(const CellGeometry& cell, int k, const Eigen::MatrixXd& pi_nabla);

ProjectorSet build_projectors(const CellGeometry& cell, int k);

} // namespace vemcdr
