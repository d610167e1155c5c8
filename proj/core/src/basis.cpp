#include "vemcdr/basis.hpp"

#include "vemcdr/error.hpp"

#include <cmath>

namespace vemcdr {

namespace {

// p[n] = t^n for n = 0..degree
void powers(double t, int degree, double* p)
{
    p[0] = 1.0;
    for (int n = 1; n <= degree; ++n)
        p[n] = p[n - 1] * t;
}

} // namespace

std::vector<Exponent> exponents(int degree)
{
    std::vector<Exponent> e;
    e.reserve(poly_dim(degree));
    for (int d = 0; d <= degree; ++d)
        for (int b = 0; b <= d; ++b)
            e.push_back({d - b, b});
    return e;
}

ScaledMonomialBasis::ScaledMonomialBasis(Point center, double scale, int degree)
    : center_(std::move(center)), scale_(scale), degree_(degree), exps_(vemcdr::exponents(degree))
{
    if (degree < 0 || degree > 15)
        throw ParameterError("basis degree must lie in [0, 15]");
    if (!(scale > 0.0))
        throw ParameterError("basis scale must be positive");
}

Eigen::VectorXd ScaledMonomialBasis::eval(const Point& x) const
{
    double px[16], py[16];
    const Point xi = (x - center_) / scale_;
    powers(xi.x(), degree_, px);
    powers(xi.y(), degree_, py);
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i)
        v[i] = px[exps_[i].a] * py[exps_[i].b];
    return v;
}

Eigen::MatrixX2d ScaledMonomialBasis::eval_grad(const Point& x) const
{
    double px[16], py[16];
    const Point xi = (x - center_) / scale_;
    powers(xi.x(), degree_, px);
    powers(xi.y(), degree_, py);
    Eigen::MatrixX2d g(size(), 2);
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = exps_[i];
        g(i, 0) = a > 0 ? a * px[a - 1] * py[b] / scale_ : 0.0;
        g(i, 1) = b > 0 ? b * px[a] * py[b - 1] / scale_ : 0.0;
    }
    return g;
}

Eigen::VectorXd ScaledMonomialBasis::eval_laplacian(const Point& x) const
{
    double px[16], py[16];
    const Point xi = (x - center_) / scale_;
    powers(xi.x(), degree_, px);
    powers(xi.y(), degree_, py);
    const double h2 = scale_ * scale_;
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) {
        const auto [a, b] = exps_[i];
        double s = 0.0;
        if (a > 1)
            s += a * (a - 1) * px[a - 2] * py[b];
        if (b > 1)
            s += b * (b - 1) * px[a] * py[b - 2];
        v[i] = s / h2;
    }
    return v;
}

double ScaledMonomialBasis::eval_poly(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                      const Point& x) const
{
    const Eigen::VectorXd m = eval(x);
    return m.head(coeffs.size()).dot(coeffs);
}

Point ScaledMonomialBasis::eval_poly_grad(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                          const Point& x) const
{
    const Eigen::MatrixX2d g = eval_grad(x);
    return g.topRows(coeffs.size()).transpose() * coeffs;
}

EdgeMonomialBasis::EdgeMonomialBasis(Point midpoint, Point tangent, double length, int degree)
    : midpoint_(std::move(midpoint)), tangent_(std::move(tangent)), length_(length), degree_(degree)
{
    if (degree < 0 || degree > 15)
        throw ParameterError("edge basis degree must lie in [0, 15]");
    if (!(length > 0.0))
        throw ParameterError("edge length must be positive");
}

EdgeMonomialBasis::EdgeMonomialBasis(const EdgeGeometry& edge, int degree)
    : EdgeMonomialBasis(edge.midpoint, edge.tangent, edge.length, degree)
{}

double EdgeMonomialBasis::parameter(const Point& x) const
{
    return (x - midpoint_).dot(tangent_) / length_;
}

Eigen::VectorXd EdgeMonomialBasis::eval(const Point& x) const
{
    Eigen::VectorXd v(size());
    powers(parameter(x), degree_, v.data());
    return v;
}

Eigen::MatrixXd derivative_matrix(int degree, int axis, double scale)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(poly_dim(degree - 1), poly_dim(degree));
    int col = 0;
    for (const auto [a, b] : exponents(degree)) {
        if (axis == 0 && a > 0)
            d(monomial_index(a - 1, b), col) = a / scale;
        else if (axis == 1 && b > 0)
            d(monomial_index(a, b - 1), col) = b / scale;
        ++col;
    }
    return d;
}

Eigen::MatrixXd laplacian_matrix(int degree, double scale)
{
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(poly_dim(degree - 2), poly_dim(degree));
    const double h2 = scale * scale;
    int col = 0;
    for (const auto [a, b] : exponents(degree)) {
        if (a > 1)
            l(monomial_index(a - 2, b), col) += a * (a - 1) / h2;
        if (b > 1)
            l(monomial_index(a, b - 2), col) += b * (b - 1) / h2;
        ++col;
    }
    return l;
}

int degree_of(std::size_t ncoeffs)
{
    for (int d = 0; d < 64; ++d)
        if (static_cast<std::size_t>(poly_dim(d)) == ncoeffs)
            return d;
    throw ParameterError("coefficient count " + std::to_string(ncoeffs)
                         + " is not a bivariate polynomial dimension");
}

Eigen::VectorXd differentiate(const Eigen::VectorXd& coeffs, int axis, double scale)
{
    return derivative_matrix(degree_of(coeffs.size()), axis, scale) * coeffs;
}

Eigen::VectorXd laplacian(const Eigen::VectorXd& coeffs, double scale)
{
    return laplacian_matrix(degree_of(coeffs.size()), scale) * coeffs;
}

Eigen::VectorXd dot_with_field(const ScaledMonomialBasis& basis, const Eigen::VectorXd& px,
                               const Eigen::VectorXd& py, std::span<const Point> points,
                               std::span<const Point> field)
{
    if (points.size() != field.size())
        throw ParameterError("field must be sampled at every point");
    Eigen::VectorXd out(points.size());
    for (std::size_t q = 0; q < points.size(); ++q)
        out[q] = field[q].x() * basis.eval_poly(px, points[q])
                 + field[q].y() * basis.eval_poly(py, points[q]);
    return out;
}

} // namespace vemcdr
