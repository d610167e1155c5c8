#pragma once

#include "vemcdr/mesh.hpp"

#include <array>
#include <vector>

namespace vemcdr {

/// Points and weights of a quadrature rule. Weights are already scaled by the
/// measure of the integration domain, so `sum(w_i f(x_i))` approximates the
/// integral directly.
struct QuadRule
{
    std::vector<Point> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }

    template <typename F>
    double integrate(F&& f) const
    {
        double s = 0.0;
        for (std::size_t q = 0; q < weights.size(); ++q)
            s += weights[q] * f(points[q]);
        return s;
    }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int npoints);

/// Gauss-Legendre rule on the segment a-b with ceil((degree+1)/2) points.
QuadRule edge_rule(const Point& a, const Point& b, int degree);

/// Rule on a single triangle, exact for polynomials of the given degree.
QuadRule triangle_rule(const Point& a, const Point& b, const Point& c, int degree);

/// Polygon rule: fan triangulation from the centroid, or ear clipping when the
/// polygon is not star-shaped with respect to its centroid.
QuadRule cell_rule(const CellGeometry& cell, int degree);
QuadRule cell_rule(const std::vector<Point>& polygon, const Point& centroid, int degree);

/// Ear-clipping triangulation of a simple CCW polygon (indices into polygon).
std::vector<std::array<std::size_t, 3>> ear_clip(const std::vector<Point>& polygon);

} // namespace vemcdr
