#pragma once

#include "vemcdr/mesh.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace vemcdr {

/// Exponent pair (a, b) of the monomial x^a y^b.
struct Exponent
{
    int a = 0;
    int b = 0;
};

/// Number of bivariate monomials of total degree <= degree (0 for degree < 0).
constexpr int poly_dim(int degree) noexcept
{
    return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2;
}

/// Position of x^a y^b in the graded-lex ordering
/// (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
constexpr int monomial_index(int a, int b) noexcept
{
    const int d = a + b;
    return d * (d + 1) / 2 + b;
}

std::vector<Exponent> exponents(int degree);

/// Scaled monomials ((x - x_T)/h_T)^a ((y - y_T)/h_T)^b with a + b <= degree.
class ScaledMonomialBasis
{
public:
    ScaledMonomialBasis(Point center, double scale, int degree);

    int degree() const noexcept { return degree_; }
    int size() const noexcept { return poly_dim(degree_); }
    const Point& center() const noexcept { return center_; }
    double scale() const noexcept { return scale_; }
    const std::vector<Exponent>& exponents() const noexcept { return exps_; }

    Eigen::VectorXd eval(const Point& x) const;
    /// Row i holds the gradient of monomial i.
    Eigen::MatrixX2d eval_grad(const Point& x) const;
    Eigen::VectorXd eval_laplacian(const Point& x) const;

    /// Value of the polynomial sum_i coeffs[i] m_i at x; coeffs may be shorter
    /// than size() (lower-degree polynomial in the same basis).
    double eval_poly(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) const;
    Point eval_poly_grad(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Point& x) const;

private:
    Point center_;
    double scale_;
    int degree_;
    std::vector<Exponent> exps_;
};

/// Scaled monomials s^j, j <= degree, on an edge with s = (x - x_e).t / h_e,
/// where t is the unit tangent from the lower to the higher global vertex id.
class EdgeMonomialBasis
{
public:
    EdgeMonomialBasis(Point midpoint, Point tangent, double length, int degree);
    explicit EdgeMonomialBasis(const EdgeGeometry& edge, int degree);

    int degree() const noexcept { return degree_; }
    int size() const noexcept { return degree_ + 1; }
    double parameter(const Point& x) const;
    Eigen::VectorXd eval(const Point& x) const;

private:
    Point midpoint_;
    Point tangent_;
    double length_;
    int degree_;
};

// Coefficient-level calculus in a scaled basis with the given scale h.

/// Matrix of d/dx (axis 0) or d/dy (axis 1): maps degree-d coefficients to
/// degree-(d-1) coefficients.
Eigen::MatrixXd derivative_matrix(int degree, int axis, double scale);

/// Matrix of the Laplacian: degree-d coefficients to degree-(d-2) coefficients.
Eigen::MatrixXd laplacian_matrix(int degree, double scale);

/// Degree of the polynomial whose coefficient vector has the given length.
int degree_of(std::size_t ncoeffs);

Eigen::VectorXd differentiate(const Eigen::VectorXd& coeffs, int axis, double scale);
Eigen::VectorXd laplacian(const Eigen::VectorXd& coeffs, double scale);

/// Samples b(x_q) . (p_x(x_q), p_y(x_q)) for a vector polynomial (p_x, p_y)
/// given by coefficients in `basis` and a vector field sampled at the points.
Eigen::VectorXd dot_with_field(const ScaledMonomialBasis& basis,
                               const Eigen::VectorXd& px, const Eigen::VectorXd& py,
                               std::span<const Point> points, std::span<const Point> field);

} // namespace vemcdr
