#include "vemcdr/mesh.hpp"

#include "vemcdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

namespace vemcdr {

double signed_area(const std::vector<Point>& polygon)
{
    double twice = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = polygon[i];
        const Point& b = polygon[(i + 1) % n];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells))
{
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> lookup;
    // traversal direction of the first owner, to reject inconsistent orientation
    std::vector<bool> first_forward;

    cell_edges_.resize(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cyc = cells_[c];
        if (cyc.size() < 3)
            throw GeometryError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (std::size_t v : cyc)
            if (v >= vertices_.size())
                throw GeometryError("cell " + std::to_string(c) + " references vertex "
                                    + std::to_string(v) + " out of range");
        if (!(signed_area(cell_vertices(c)) > 0.0))
            throw GeometryError("cell " + std::to_string(c) + " is not counter-clockwise");

        cell_edges_[c].reserve(cyc.size());
        for (std::size_t i = 0; i < cyc.size(); ++i) {
            const std::size_t a = cyc[i];
            const std::size_t b = cyc[(i + 1) % cyc.size()];
            if (a == b)
                throw GeometryError("cell " + std::to_string(c) + " repeats vertex "
                                    + std::to_string(a));
            const auto key = std::minmax(a, b);
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                const std::size_t id = edges_.size();
                lookup.emplace(key, id);
                edges_.push_back(Edge{key.first, key.second, c, std::nullopt});
                first_forward.push_back(a < b);
                cell_edges_[c].push_back(id);
                continue;
            }
            Edge& e = edges_[it->second];
            if (e.cell_right)
                throw GeometryError("edge (" + std::to_string(key.first) + ", "
                                    + std::to_string(key.second) + ") has more than two cells");
            if (first_forward[it->second] == (a < b))
                throw GeometryError("edge (" + std::to_string(key.first) + ", "
                                    + std::to_string(key.second)
                                    + ") traversed in the same direction by two cells");
            e.cell_right = c;
            cell_edges_[c].push_back(it->second);
        }
    }

    for (std::size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].is_boundary())
            boundary_edges_.push_back(e);
}

std::vector<Point> PolyMesh::cell_vertices(std::size_t c) const
{
    const auto& cyc = cells_.at(c);
    std::vector<Point> pts;
    pts.reserve(cyc.size());
    for (std::size_t v : cyc)
        pts.push_back(vertices_[v]);
    return pts;
}

MeshKind parse_mesh_kind(std::string_view name)
{
    if (name == "tri") return MeshKind::tri;
    if (name == "quad") return MeshKind::quad;
    if (name == "quad_perturbed") return MeshKind::quad_perturbed;
    if (name == "hex_dominant") return MeshKind::hex_dominant;
    throw ParameterError("unknown mesh kind '" + std::string(name) + "'");
}

std::string to_string(MeshKind kind)
{
    switch (kind) {
    case MeshKind::tri: return "tri";
    case MeshKind::quad: return "quad";
    case MeshKind::quad_perturbed: return "quad_perturbed";
    case MeshKind::hex_dominant: return "hex_dominant";
    }
    return "unknown";
}

namespace {

std::vector<Point> grid_vertices(std::size_t nx, std::size_t ny)
{
    std::vector<Point> pts;
    pts.reserve((nx + 1) * (ny + 1));
    for (std::size_t j = 0; j <= ny; ++j)
        for (std::size_t i = 0; i <= nx; ++i)
            pts.emplace_back(double(i) / double(nx), double(j) / double(ny));
    return pts;
}

PolyMesh quad_grid(std::size_t nx, std::size_t ny, double perturb, std::uint64_t seed)
{
    auto pts = grid_vertices(nx, ny);
    if (perturb > 0.0) {
        // each coordinate moves by at most amp/sqrt(2), so |displacement| <= amp
        const double amp = perturb * std::min(1.0 / double(nx), 1.0 / double(ny)) / std::sqrt(2.0);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t j = 1; j < ny; ++j)
            for (std::size_t i = 1; i < nx; ++i) {
                Point& p = pts[j * (nx + 1) + i];
                p.x() += amp * unit(rng);
                p.y() += amp * unit(rng);
            }
    }
    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t v = j * (nx + 1) + i;
            cells.push_back({v, v + 1, v + nx + 2, v + nx + 1});
        }
    return PolyMesh(std::move(pts), std::move(cells));
}

PolyMesh tri_grid(std::size_t nx, std::size_t ny)
{
    auto pts = grid_vertices(nx, ny);
    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(2 * nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t v = j * (nx + 1) + i;
            cells.push_back({v, v + 1, v + nx + 2});
            cells.push_back({v, v + nx + 2, v + nx + 1});
        }
    return PolyMesh(std::move(pts), std::move(cells));
}

// Honeycomb-like tiling built from a brick wall: even rows hold nx bricks,
// odd rows are offset by half a brick and close with half bricks at x = 0, 1.
// Interior vertices are lifted or lowered by a sixth of the row height so
// interior bricks become convex hexagons; vertices on the domain boundary stay put.
PolyMesh hex_grid(std::size_t nx, std::size_t ny)
{
    const double shift = 1.0 / (6.0 * double(ny));
    // x positions (in units of 1/(2 nx)) of vertical edges in row r
    auto row_has = [](std::size_t row, std::size_t m) { return (m % 2) == (row % 2); };

    std::vector<Point> pts;
    std::vector<std::vector<std::size_t>> line_ids(ny + 1);  // line j -> id per m (or npos)
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j <= ny; ++j) {
        line_ids[j].assign(2 * nx + 1, none);
        for (std::size_t m = 0; m <= 2 * nx; ++m) {
            const bool in_below = j > 0 && (row_has(j - 1, m) || m == 0 || m == 2 * nx);
            const bool in_above = j < ny && (row_has(j, m) || m == 0 || m == 2 * nx);
            if (!in_below && !in_above)
                continue;
            double y = double(j) / double(ny);
            const bool interior = j > 0 && j < ny && m > 0 && m < 2 * nx;
            if (interior)
                y += row_has(j, m) ? shift : -shift;
            line_ids[j][m] = pts.size();
            pts.emplace_back(double(m) / double(2 * nx), y);
        }
    }

    std::vector<std::vector<std::size_t>> cells;
    for (std::size_t j = 0; j < ny; ++j) {
        std::vector<std::size_t> walls;
        for (std::size_t m = 0; m <= 2 * nx; ++m)
            if (row_has(j, m) || m == 0 || m == 2 * nx)
                walls.push_back(m);
        for (std::size_t w = 0; w + 1 < walls.size(); ++w) {
            const std::size_t a = walls[w], b = walls[w + 1];
            std::vector<std::size_t> cyc;
            for (std::size_t m = a; m <= b; ++m)
                if (line_ids[j][m] != none)
                    cyc.push_back(line_ids[j][m]);
            for (std::size_t m = b + 1; m-- > a;)
                if (line_ids[j + 1][m] != none)
                    cyc.push_back(line_ids[j + 1][m]);
            cells.push_back(std::move(cyc));
        }
    }
    return PolyMesh(std::move(pts), std::move(cells));
}

} // namespace

PolyMesh generate_mesh(MeshKind kind, std::size_t nx, std::size_t ny, double perturb,
                       std::uint64_t seed)
{
    if (nx < 1 || ny < 1)
        throw ParameterError("mesh resolution must be at least 1x1");
    if (!(perturb >= 0.0 && perturb < 0.5))
        throw ParameterError("perturbation must lie in [0, 0.5)");
    switch (kind) {
    case MeshKind::tri: return tri_grid(nx, ny);
    case MeshKind::quad: return quad_grid(nx, ny, 0.0, seed);
    case MeshKind::quad_perturbed: return quad_grid(nx, ny, perturb, seed);
    case MeshKind::hex_dominant: return hex_grid(nx, ny);
    }
    throw ParameterError("unknown mesh kind");
}

// ---------------------------------------------------------------------------
// vempoly text format

namespace {

struct LineReader
{
    std::istream& in;
    std::size_t line_no = 0;

    // next non-blank, non-comment line; false at EOF
    bool next(std::string& line)
    {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#')
                continue;
            return true;
        }
        return false;
    }

    std::string require(const char* what)
    {
        std::string line;
        if (!next(line))
            throw ParseError(std::string("unexpected end of input, expected ") + what, line_no + 1);
        return line;
    }
};

std::size_t parse_count(const std::string& line, const char* keyword, std::size_t line_no)
{
    std::istringstream ss(line);
    std::string kw;
    long long n = -1;
    std::string extra;
    if (!(ss >> kw >> n) || kw != keyword || n < 0 || (ss >> extra))
        throw ParseError(std::string("expected '") + keyword + " N'", line_no);
    return static_cast<std::size_t>(n);
}

} // namespace

PolyMesh read_mesh(std::istream& in)
{
    LineReader rd{in};
    {
        const std::string header = rd.require("header");
        std::istringstream ss(header);
        std::string magic, extra;
        int version = 0;
        if (!(ss >> magic >> version) || magic != "vempoly" || version != 1 || (ss >> extra))
            throw ParseError("malformed header, expected 'vempoly 1'", rd.line_no);
    }

    const std::size_t nv = parse_count(rd.require("vertex count"), "vertices", rd.line_no);
    std::vector<Point> pts;
    pts.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const std::string line = rd.require("vertex");
        std::istringstream ss(line);
        double x = 0.0, y = 0.0;
        std::string extra;
        if (!(ss >> x >> y) || (ss >> extra) || !std::isfinite(x) || !std::isfinite(y))
            throw ParseError("malformed vertex, expected 'x y'", rd.line_no);
        pts.emplace_back(x, y);
    }

    const std::size_t nc = parse_count(rd.require("cell count"), "cells", rd.line_no);
    std::vector<std::vector<std::size_t>> cells;
    cells.reserve(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const std::string line = rd.require("cell");
        std::istringstream ss(line);
        long long n = 0;
        if (!(ss >> n) || n < 3)
            throw ParseError("cell needs a vertex count of at least 3", rd.line_no);
        std::vector<std::size_t> cyc;
        for (long long i = 0; i < n; ++i) {
            long long v = -1;
            if (!(ss >> v))
                throw ParseError("cell lists fewer vertices than declared", rd.line_no);
            if (v < 0 || static_cast<std::size_t>(v) >= nv)
                throw ParseError("vertex index " + std::to_string(v) + " out of range", rd.line_no);
            cyc.push_back(static_cast<std::size_t>(v));
        }
        std::string extra;
        if (ss >> extra)
            throw ParseError("trailing data after cell", rd.line_no);
        std::vector<Point> poly;
        for (std::size_t v : cyc)
            poly.push_back(pts[v]);
        if (!(signed_area(poly) > 0.0))
            throw ParseError("cell is not counter-clockwise", rd.line_no);
        cells.push_back(std::move(cyc));
    }

    std::string trailing;
    if (rd.next(trailing))
        throw ParseError("unexpected content after cells", rd.line_no);

    try {
        return PolyMesh(std::move(pts), std::move(cells));
    } catch (const GeometryError& e) {
        throw ParseError(e.what(), rd.line_no);
    }
}

PolyMesh read_mesh(const std::string& text)
{
    std::istringstream in(text);
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh)
{
    const auto old_prec = out.precision();
    out << "vempoly 1\n";
    out << "vertices " << mesh.num_vertices() << '\n';
    out << std::setprecision(17);
    for (const Point& p : mesh.vertices())
        out << p.x() << ' ' << p.y() << '\n';
    out << "cells " << mesh.num_cells() << '\n';
    for (const auto& cyc : mesh.cells()) {
        out << cyc.size();
        for (std::size_t v : cyc)
            out << ' ' << v;
        out << '\n';
    }
    out.precision(old_prec);
}

std::string write_mesh(const PolyMesh& mesh)
{
    std::ostringstream out;
    write_mesh(out, mesh);
    return out.str();
}

// ---------------------------------------------------------------------------

CellGeometry cell_geometry(const PolyMesh& mesh, std::size_t cell_id)
{
    if (cell_id >= mesh.num_cells())
        throw ParameterError("cell id " + std::to_string(cell_id) + " out of range");

    CellGeometry g;
    g.cell_id = cell_id;
    g.vertices = mesh.cell_vertices(cell_id);
    const auto& pts = g.vertices;
    const std::size_t n = pts.size();

    // shoelace area and centroid, relative to the first vertex for accuracy
    double twice = 0.0;
    Point moment = Point::Zero();
    const Point o = pts[0];
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = pts[i] - o;
        const Point b = pts[(i + 1) % n] - o;
        const double cross = a.x() * b.y() - b.x() * a.y();
        twice += cross;
        moment += cross * (a + b);
    }
    g.area = 0.5 * twice;
    if (!(g.area > 0.0))
        throw GeometryError("cell " + std::to_string(cell_id) + " has non-positive area");
    g.centroid = o + moment / (3.0 * twice);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.diameter = std::max(g.diameter, (pts[i] - pts[j]).norm());

    const auto& cyc = mesh.cell(cell_id);
    const auto& eids = mesh.cell_edges(cell_id);
    g.edges.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Edge& e = mesh.edge(eids[i]);
        EdgeGeometry eg;
        eg.edge_id = eids[i];
        eg.start = mesh.vertex(e.v0);
        eg.end = mesh.vertex(e.v1);
        const Point d = eg.end - eg.start;
        eg.length = d.norm();
        if (!(eg.length > 0.0))
            throw GeometryError("cell " + std::to_string(cell_id) + " has a zero-length edge");
        eg.midpoint = 0.5 * (eg.start + eg.end);
        eg.tangent = d / eg.length;
        // outward normal: rotate the CCW traversal direction clockwise
        const Point trav = mesh.vertex(cyc[(i + 1) % n]) - mesh.vertex(cyc[i]);
        eg.normal = Point(trav.y(), -trav.x()) / eg.length;
        g.edges.push_back(eg);
    }
    return g;
}

EdgeGeometry edge_geometry(const PolyMesh& mesh, std::size_t edge_id)
{
    const CellGeometry g = cell_geometry(mesh, mesh.edge(edge_id).cell_left);
    for (const auto& eg : g.edges)
        if (eg.edge_id == edge_id)
            return eg;
    throw GeometryError("edge " + std::to_string(edge_id) + " missing from its left cell");
}

QualityReport quality_report(const PolyMesh& mesh)
{
    QualityReport r;
    r.rho_z1 = std::numeric_limits<double>::infinity();
    r.star_shaped_ok.reserve(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(mesh, c);
        r.h_max = std::max(r.h_max, g.diameter);
        double min_edge = std::numeric_limits<double>::infinity();
        // the centroid lies in the kernel interior iff it is strictly inside
        // every edge's half-plane; the inscribed disk then has radius min_dist
        double min_dist = std::numeric_limits<double>::infinity();
        for (const auto& e : g.edges) {
            min_edge = std::min(min_edge, e.length);
            min_dist = std::min(min_dist, (e.midpoint - g.centroid).dot(e.normal));
        }
        r.rho_z1 = std::min(r.rho_z1, min_edge / g.diameter);
        r.star_shaped_ok.push_back(min_dist > 0.0);
    }
    if (mesh.num_cells() == 0)
        r.rho_z1 = 0.0;
    return r;
}

} // namespace vemcdr
