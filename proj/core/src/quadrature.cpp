#include "vemcdr/quadrature.hpp"

#include "vemcdr/error.hpp"

#include <cmath>
#include <numbers>

namespace vemcdr {

GaussLegendre gauss_legendre(int npoints)
{
    if (npoints < 1)
        throw ParameterError("Gauss-Legendre rule needs at least one point");
    const int n = npoints;
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        gl.nodes[n / 2] = 0.0;
    return gl;
}

QuadRule edge_rule(const Point& a, const Point& b, int degree)
{
    if (degree < 0)
        degree = 0;
    const int npts = (degree + 2) / 2;
    const GaussLegendre gl = gauss_legendre(npts);
    const double len = (b - a).norm();
    QuadRule r;
    r.points.reserve(npts);
    r.weights.reserve(npts);
    for (int i = 0; i < npts; ++i) {
        const double t = 0.5 * (gl.nodes[i] + 1.0);
        r.points.push_back(a + t * (b - a));
        r.weights.push_back(0.5 * gl.weights[i] * len);
    }
    return r;
}

namespace {

// reference-triangle rule on {(s,t): s,t >= 0, s+t <= 1}, weights sum to 1/2
struct RefRule
{
    std::vector<double> s, t, w;
};

RefRule reference_triangle(int degree)
{
    RefRule r;
    if (degree <= 1) {
        r.s = {1.0 / 3.0};
        r.t = {1.0 / 3.0};
        r.w = {0.5};
        return r;
    }
    if (degree == 2) {
        r.s = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
        r.t = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
        r.w = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        return r;
    }
    // collapsed tensor Gauss: s = u, t = (1-u) v, Jacobian (1-u)
    const GaussLegendre gu = gauss_legendre((degree + 3) / 2);
    const GaussLegendre gv = gauss_legendre((degree + 2) / 2);
    for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
        const double u = 0.5 * (gu.nodes[i] + 1.0);
        for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
            const double v = 0.5 * (gv.nodes[j] + 1.0);
            r.s.push_back(u);
            r.t.push_back((1.0 - u) * v);
            r.w.push_back(0.25 * gu.weights[i] * gv.weights[j] * (1.0 - u));
        }
    }
    return r;
}

void append_triangle(QuadRule& rule, const RefRule& ref, const Point& a, const Point& b,
                     const Point& c)
{
    const Point e1 = b - a;
    const Point e2 = c - a;
    const double jac = e1.x() * e2.y() - e1.y() * e2.x();
    for (std::size_t q = 0; q < ref.w.size(); ++q) {
        rule.points.push_back(a + ref.s[q] * e1 + ref.t[q] * e2);
        rule.weights.push_back(ref.w[q] * jac);
    }
}

double cross(const Point& o, const Point& a, const Point& b)
{
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

} // namespace

QuadRule triangle_rule(const Point& a, const Point& b, const Point& c, int degree)
{
    QuadRule r;
    append_triangle(r, reference_triangle(degree), a, b, c);
    return r;
}

std::vector<std::array<std::size_t, 3>> ear_clip(const std::vector<Point>& polygon)
{
    std::vector<std::size_t> idx(polygon.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::vector<std::array<std::size_t, 3>> tris;
    while (idx.size() > 3) {
        const std::size_t n = idx.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const std::size_t ip = idx[(i + n - 1) % n], ic = idx[i], in = idx[(i + 1) % n];
            const Point& p = polygon[ip];
            const Point& c = polygon[ic];
            const Point& q = polygon[in];
            if (cross(p, c, q) <= 0.0)
                continue;  // reflex or degenerate corner
            bool contains = false;
            for (std::size_t j = 0; j < n && !contains; ++j) {
                const std::size_t v = idx[j];
                if (v == ip || v == ic || v == in)
                    continue;
                const Point& x = polygon[v];
                contains = cross(p, c, x) >= 0.0 && cross(c, q, x) >= 0.0 && cross(q, p, x) >= 0.0;
            }
            if (contains)
                continue;
            tris.push_back({ip, ic, in});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
        }
        if (!clipped)
            throw GeometryError("ear clipping failed: polygon is not simple");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

QuadRule cell_rule(const std::vector<Point>& polygon, const Point& centroid, int degree)
{
    const RefRule ref = reference_triangle(degree);
    const std::size_t n = polygon.size();
    QuadRule rule;
    bool fan_ok = true;
    for (std::size_t i = 0; i < n && fan_ok; ++i)
        fan_ok = cross(centroid, polygon[i], polygon[(i + 1) % n]) > 0.0;
    if (fan_ok) {
        rule.points.reserve(n * ref.w.size());
        rule.weights.reserve(n * ref.w.size());
        for (std::size_t i = 0; i < n; ++i)
            append_triangle(rule, ref, centroid, polygon[i], polygon[(i + 1) % n]);
        return rule;
    }
    for (const auto& t : ear_clip(polygon))
        append_triangle(rule, ref, polygon[t[0]], polygon[t[1]], polygon[t[2]]);
    return rule;
}

QuadRule cell_rule(const CellGeometry& cell, int degree)
{
    return cell_rule(cell.vertices, cell.centroid, degree);
}

} // namespace vemcdr
