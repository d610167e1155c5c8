#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vemcdr {

using Point = Eigen::Vector2d;

/// Straight edge shared by one or two cells. `v0 < v1` always, so the edge
/// parameterisation (lower vertex id to higher) is the same from both sides.
struct Edge
{
    std::size_t v0 = 0;
    std::size_t v1 = 0;
    std::size_t cell_left = 0;
    std::optional<std::size_t> cell_right;

    bool is_boundary() const noexcept { return !cell_right.has_value(); }
};

/// Immutable polygonal mesh of a 2D domain.
///
/// Cells are counter-clockwise vertex cycles. `cell_edges(c)[i]` is the edge
/// joining local vertices i and i+1 of cell c.
class PolyMesh
{
public:
    PolyMesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> cells);

    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_cells() const noexcept { return cells_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const Point& vertex(std::size_t v) const { return vertices_.at(v); }
    const std::vector<std::size_t>& cell(std::size_t c) const { return cells_.at(c); }
    const std::vector<std::vector<std::size_t>>& cells() const noexcept { return cells_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    const std::vector<std::size_t>& cell_edges(std::size_t c) const { return cell_edges_.at(c); }
    const std::vector<std::size_t>& boundary_edges() const noexcept { return boundary_edges_; }

    std::vector<Point> cell_vertices(std::size_t c) const;

private:
    std::vector<Point> vertices_;
    std::vector<std::vector<std::size_t>> cells_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> cell_edges_;
    std::vector<std::size_t> boundary_edges_;
};

struct EdgeGeometry
{
    std::size_t edge_id = 0;
    double length = 0.0;
    Point midpoint = Point::Zero();
    Point normal = Point::Zero();   // outward w.r.t. the cell
    Point tangent = Point::Zero();  // unit, from lower to higher global vertex id
    Point start = Point::Zero();    // endpoint with lower global vertex id
    Point end = Point::Zero();
};

struct CellGeometry
{
    std::size_t cell_id = 0;
    double area = 0.0;
    Point centroid = Point::Zero();
    double diameter = 0.0;
    std::vector<Point> vertices;
    std::vector<EdgeGeometry> edges;  // same order as PolyMesh::cell_edges
};

struct QualityReport
{
    double rho_z1 = 0.0;
    std::vector<bool> star_shaped_ok;
    double h_max = 0.0;
};

enum class MeshKind { tri, quad, quad_perturbed, hex_dominant };

MeshKind parse_mesh_kind(std::string_view name);
std::string to_string(MeshKind kind);

/// Meshes of the unit square used by the convergence studies.
PolyMesh generate_mesh(MeshKind kind, std::size_t nx, std::size_t ny,
                       double perturb = 0.0, std::uint64_t seed = 0);

PolyMesh read_mesh(std::istream& in);
PolyMesh read_mesh(const std::string& text);
void write_mesh(std::ostream& out, const PolyMesh& mesh);
std::string write_mesh(const PolyMesh& mesh);

/// Shoelace signed area of a closed vertex cycle.
double signed_area(const std::vector<Point>& polygon);

CellGeometry cell_geometry(const PolyMesh& mesh, std::size_t cell_id);
/// Geometry of a global edge; the normal points out of `cell_left`.
EdgeGeometry edge_geometry(const PolyMesh& mesh, std::size_t edge_id);
QualityReport quality_report(const PolyMesh& mesh);

} // namespace vemcdr
