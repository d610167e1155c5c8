#include "../oracle/cells.hpp"

#include "vemcdr/error.hpp"
#include "vemcdr/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <sstream>

using namespace vemcdr;

namespace {

double total_area(const PolyMesh& m)
{
    double a = 0.0;
    for (std::size_t c = 0; c < m.num_cells(); ++c)
        a += signed_area(m.cell_vertices(c));
    return a;
}

const MeshKind all_kinds[] = {MeshKind::tri, MeshKind::quad, MeshKind::quad_perturbed, MeshKind::hex_dominant};

} // namespace

TEST(Mesh, QuadCounts)
{
    const PolyMesh m = generate_mesh(MeshKind::quad, 2, 2);
    EXPECT_EQ(m.num_vertices(), 9u);
    EXPECT_EQ(m.num_cells(), 4u);
    EXPECT_EQ(m.num_edges(), 12u);
    EXPECT_EQ(m.boundary_edges().size(), 8u);
}

TEST(Mesh, TriSplitsSquare)
{
    const PolyMesh m = generate_mesh(MeshKind::tri, 1, 1);
    EXPECT_EQ(m.num_cells(), 2u);
    for (std::size_t c = 0; c < 2; ++c)
        EXPECT_EQ(m.cell(c).size(), 3u);
    EXPECT_NEAR(total_area(m), 1.0, 1e-15);
}

TEST(Mesh, PerturbedQuadIsCcwAndCoversSquare)
{
    const PolyMesh m = generate_mesh(MeshKind::quad_perturbed, 4, 4, 0.2, 7);
    EXPECT_EQ(m.num_cells(), 16u);
    double area = 0.0;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        // shoelace written out independently of signed_area
        const auto v = m.cell_vertices(c);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            s += p.x() * q.y() - q.x() * p.y();
        }
        EXPECT_GT(s, 0.0);
        area += 0.5 * s;
    }
    EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(Mesh, PerturbationIsDeterministic)
{
    const PolyMesh a = generate_mesh(MeshKind::quad_perturbed, 5, 4, 0.3, 42);
    const PolyMesh b = generate_mesh(MeshKind::quad_perturbed, 5, 4, 0.3, 42);
    const PolyMesh c = generate_mesh(MeshKind::quad_perturbed, 5, 4, 0.3, 43);
    EXPECT_EQ(write_mesh(a), write_mesh(b));
    EXPECT_NE(write_mesh(a), write_mesh(c));
}

TEST(Mesh, InvalidParameters)
{
    EXPECT_THROW(generate_mesh(MeshKind::quad_perturbed, 4, 4, 0.5, 0), ParameterError);
    EXPECT_THROW(generate_mesh(MeshKind::quad_perturbed, 4, 4, -0.1, 0), ParameterError);
    EXPECT_THROW(generate_mesh(MeshKind::quad, 0, 4), ParameterError);
    EXPECT_THROW(parse_mesh_kind("pentagon"), ParameterError);
}

TEST(Mesh, GeneratedMeshInvariants)
{
    for (MeshKind kind : all_kinds)
        for (std::size_t n : {1u, 3u, 6u}) {
            const PolyMesh m = generate_mesh(kind, n, n + 1, kind == MeshKind::quad_perturbed ? 0.25 : 0.0, 3);
            SCOPED_TRACE(to_string(kind) + " " + std::to_string(n));
            EXPECT_NEAR(total_area(m), 1.0, 1e-12);

            // every interior edge is traversed by two cells in opposite directions
            std::map<std::pair<std::size_t, std::size_t>, int> directed;
            for (std::size_t c = 0; c < m.num_cells(); ++c) {
                const auto& cv = m.cell(c);
                for (std::size_t i = 0; i < cv.size(); ++i)
                    ++directed[{cv[i], cv[(i + 1) % cv.size()]}];
            }
            std::size_t nb = 0;
            for (std::size_t e = 0; e < m.num_edges(); ++e) {
                const Edge& ed = m.edge(e);
                const int fw = directed[{ed.v0, ed.v1}], bw = directed[{ed.v1, ed.v0}];
                if (ed.is_boundary()) {
                    EXPECT_EQ(fw + bw, 1);
                    ++nb;
                } else {
                    EXPECT_EQ(fw, 1);
                    EXPECT_EQ(bw, 1);
                }
                EXPECT_LT(ed.v0, ed.v1);
            }
            EXPECT_EQ(nb, m.boundary_edges().size());
            for (std::size_t e : m.boundary_edges())
                EXPECT_TRUE(m.edge(e).is_boundary());

            for (std::size_t c = 0; c < m.num_cells(); ++c) {
                const CellGeometry g = cell_geometry(m, c);
                Point closure = Point::Zero();
                for (const auto& e : g.edges) {
                    closure += e.length * e.normal;
                    EXPECT_LE(e.length, g.diameter + 1e-15);
                }
                EXPECT_LT(closure.norm(), 1e-12);
            }
        }
}

TEST(Mesh, ReadSingleTriangle)
{
    const PolyMesh m = read_mesh(std::string("vempoly 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 2\n"));
    EXPECT_EQ(m.num_edges(), 3u);
    EXPECT_EQ(m.boundary_edges().size(), 3u);
}

TEST(Mesh, ReadErrorsNameTheLine)
{
    try {
        (void)read_mesh(std::string("vempoly 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 1 7\n"));
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 7u);
    }
    EXPECT_THROW(read_mesh(std::string("vempolyx 1\n")), ParseError);
    // clockwise cell
    try {
        (void)read_mesh(std::string("vempoly 1\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n3 0 2 1\n"));
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 7u);
    }
}

TEST(Mesh, RoundTripIsBitStable)
{
    for (MeshKind kind : all_kinds) {
        const PolyMesh m = generate_mesh(kind, 3, 3, kind == MeshKind::quad_perturbed ? 0.3 : 0.0, 5);
        const std::string text = write_mesh(m);
        const PolyMesh back = read_mesh(text);
        EXPECT_EQ(back.cells(), m.cells());
        ASSERT_EQ(back.num_vertices(), m.num_vertices());
        for (std::size_t v = 0; v < m.num_vertices(); ++v)
            EXPECT_EQ(std::memcmp(back.vertex(v).data(), m.vertex(v).data(), 2 * sizeof(double)), 0);
        EXPECT_EQ(write_mesh(back), text);
    }
}

TEST(Mesh, CellGeometryExamples)
{
    const CellGeometry sq = oracle::single_cell(oracle::unit_square());
    EXPECT_DOUBLE_EQ(sq.area, 1.0);
    EXPECT_NEAR((sq.centroid - Point(0.5, 0.5)).norm(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(sq.diameter, std::sqrt(2.0));

    const CellGeometry tri = oracle::single_cell(oracle::right_triangle());
    EXPECT_DOUBLE_EQ(tri.area, 0.5);
    EXPECT_NEAR((tri.centroid - Point(1.0 / 3.0, 1.0 / 3.0)).norm(), 0.0, 1e-15);

    const CellGeometry hex = oracle::single_cell(oracle::regular_polygon(6, 1.0));
    EXPECT_NEAR(hex.area, 3.0 * std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(hex.centroid.norm(), 0.0, 1e-15);
}

TEST(Mesh, DegenerateCellIsRejected)
{
    EXPECT_THROW(PolyMesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), Error);
}

TEST(Mesh, QualityReport)
{
    EXPECT_NEAR(quality_report(generate_mesh(MeshKind::quad, 4, 4)).rho_z1, 1.0 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(quality_report(generate_mesh(MeshKind::tri, 4, 4)).rho_z1, 1.0 / std::sqrt(2.0), 1e-14);
    const QualityReport q = quality_report(generate_mesh(MeshKind::quad_perturbed, 4, 4, 0.2, 7));
    EXPECT_GT(q.rho_z1, 0.0);
    EXPECT_EQ(q.star_shaped_ok.size(), 16u);
    for (bool ok : q.star_shaped_ok)
        EXPECT_TRUE(ok);
}
