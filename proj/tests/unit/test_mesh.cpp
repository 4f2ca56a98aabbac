#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sdgm/errors.hpp"
#include "sdgm/mesh.hpp"
#include "support.hpp"

using namespace sdgm;

namespace {

void expect_face_symmetry(const QuadMesh& m)
{
    for (Index f = 0; f < static_cast<Index>(m.faces().size()); ++f) {
        const Face& face = m.faces()[f];
        EXPECT_EQ(m.face_of(face.minus, face.minus_edge), f);
        if (face.boundary()) {
            EXPECT_LT(m.link(face.minus, face.minus_edge).element, 0);
            continue;
        }
        EXPECT_EQ(m.face_of(face.plus, face.plus_edge), f);
        const EdgeLink& a = m.link(face.minus, face.minus_edge);
        const EdgeLink& b = m.link(face.plus, face.plus_edge);
        EXPECT_EQ(a.element, face.plus);
        EXPECT_EQ(a.edge, face.plus_edge);
        EXPECT_EQ(b.element, face.minus);
        EXPECT_EQ(b.edge, face.minus_edge);
        EXPECT_EQ(a.flip, b.flip);
    }
}

// Each element is minus once and plus once in each of its two edge pairs.
void expect_strip_orientation(const QuadMesh& m)
{
    for (Index e = 0; e < m.num_elements(); ++e) {
        for (int pair = 0; pair < 2; ++pair) {
            int minus = 0;
            int plus = 0;
            for (int k : {pair, pair + 2}) {
                const Face& f = m.faces()[m.face_of(e, k)];
                if (f.boundary()) {
                    continue;
                }
                minus += (f.minus == e && f.minus_edge == k);
                plus += (f.plus == e && f.plus_edge == k);
            }
            EXPECT_LE(minus, 1) << "element " << e;
            EXPECT_LE(plus, 1) << "element " << e;
        }
    }
}

std::string clockwise_mesh_text()
{
    return "quadmesh 4 1 1\n"
           "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
           "e 0 3 2 1\n";
}

} // namespace

TEST(CartesianMesh, Counts)
{
    const QuadMesh m2 = cartesian_mesh(2, 2);
    EXPECT_EQ(m2.num_elements(), 4);
    EXPECT_EQ(m2.num_interior_faces(), 4);
    EXPECT_EQ(m2.num_boundary_faces(), 8);
    const QuadMesh m1 = cartesian_mesh(1, 1);
    EXPECT_EQ(m1.num_elements(), 1);
    EXPECT_EQ(m1.num_interior_faces(), 0);
    EXPECT_EQ(m1.num_boundary_faces(), 4);
    EXPECT_NEAR(cartesian_mesh(4, 4).area(), 1.0, 1e-12);
    EXPECT_NEAR(cartesian_mesh(3, 5, {-1, -2, 2, 1}).area(), 9.0, 1e-12);
    expect_face_symmetry(cartesian_mesh(3, 4));
}

TEST(CartesianMesh, LowerIndexIsMinus)
{
    for (const Face& f : test::periodic_square(4).faces()) {
        if (!f.periodic()) {
            EXPECT_LT(f.minus, f.plus);
        }
    }
}

TEST(CartesianMesh, Errors)
{
    EXPECT_THROW((void)cartesian_mesh(0, 2), ArgumentError);
    EXPECT_THROW((void)cartesian_mesh(2, 2, {0, 0, 0, 1}), ArgumentError);
}

TEST(Periodic, Counts)
{
    const QuadMesh full = apply_periodic(cartesian_mesh(2, 2), true, true);
    EXPECT_EQ(full.faces().size(), 8u);
    EXPECT_EQ(full.num_boundary_faces(), 0);
    const QuadMesh x_only = apply_periodic(cartesian_mesh(2, 2), true, false);
    EXPECT_EQ(x_only.num_interior_faces(), 6);
    EXPECT_EQ(x_only.num_boundary_faces(), 4);
    for (int n : {3, 5}) {
        EXPECT_EQ(test::periodic_square(n).faces().size(), static_cast<std::size_t>(2 * n * n));
    }
    expect_face_symmetry(full);
    expect_strip_orientation(test::periodic_square(3));
}

TEST(Periodic, ShippedMeshPairsCompletely)
{
    const QuadMesh raw = load_mesh(test::data_path("data/meshes/periodic_unstructured.mesh"));
    EXPECT_EQ(raw.num_elements(), 24);
    EXPECT_GT(raw.num_boundary_faces(), 0);
    const QuadMesh m = test::shipped_periodic_mesh();
    EXPECT_EQ(m.num_boundary_faces(), 0);
    EXPECT_NEAR(m.area(), 4.0, 1e-12);
    expect_face_symmetry(m);
    expect_strip_orientation(m);
}

TEST(Periodic, UnmatchedFaceThrows)
{
    // The right column is split in two, the left column is not.
    std::istringstream in("quadmesh 7 3 1\n"
                          "v 0 0\nv 1 0\nv 2 0\nv 2 0.5\nv 2 1\nv 1 1\nv 0 1\n"
                          "e 0 1 5 6\ne 1 2 3 5\ne 5 3 4 5\n");
    // The second quad is a triangle in disguise: reject or fail pairing.
    EXPECT_THROW((void)apply_periodic(read_mesh(in), true, false), Error);
}

TEST(Annulus, AreaConverges)
{
    const double exact = std::numbers::pi * (1.0 - 0.25);
    const QuadMesh m = annulus_mesh(8, 8, 0.5, 1.0, 0.0, 4);
    EXPECT_LE(std::abs(m.area() - exact) / exact, 1e-6);
    const QuadMesh coarse = annulus_mesh(1, 4, 0.5, 1.0, 0.0, 1);
    EXPECT_EQ(coarse.num_elements(), 4);
    // Straight-sided trapezoids: 4 * (1/2)(r_o^2 - r_i^2) sin(pi/2).
    EXPECT_NEAR(coarse.area(), 2 * (1.0 - 0.25), 1e-12);
    EXPECT_EQ(coarse.num_boundary_faces(), 8);
    EXPECT_EQ(coarse.num_interior_faces(), 4);
    expect_face_symmetry(annulus_mesh(2, 8, 0.5, 1.0, 0.1, 4));
}

TEST(Annulus, PositiveJacobians)
{
    for (int na : {8, 12, 16}) {
        const QuadMesh m = annulus_mesh(2, na, 0.5, 1.0, 0.1, 4);
        const ReferenceElement& g = m.geometry_element();
        for (Index e = 0; e < m.num_elements(); ++e) {
            for (int a = 0; a < g.num_nodes(); ++a) {
                EXPECT_GT(m.jacobian(e, g.node(a)).determinant(), 0);
            }
        }
    }
    EXPECT_THROW((void)annulus_mesh(2, 2, 0.5, 1.0), ArgumentError);
    EXPECT_THROW((void)annulus_mesh(2, 8, 1.0, 0.5), ArgumentError);
}

TEST(Annulus, GeometryNodesOnWarpedCircle)
{
    const double a = 0.1;
    const QuadMesh m = annulus_mesh(2, 8, 0.5, 1.0, a, 3);
    for (Index e = 0; e < m.num_elements(); ++e) {
        for (double t : m.geometry_element().nodes_1d()) {
            const Eigen::Vector2d x = m.map(e, {-1.0, t});
            const double theta = std::atan2(x(1), x(0));
            const double r = x.norm() / (1 + a * std::sin(2 * theta));
            // Geometry nodes on edge 3 (xi = -1) lie on a warped circle.
            EXPECT_TRUE(std::abs(r - 0.5) < 1e-12 || std::abs(r - 0.75) < 1e-12) << r;
        }
    }
}

TEST(MeshIo, RoundTrip)
{
    for (const QuadMesh& m : {test::shipped_periodic_mesh(), annulus_mesh(2, 8, 0.5, 1.0, 0.1, 3),
                              with_boundary_tag(cartesian_mesh(2, 3), BoundaryTag::Dirichlet)}) {
        std::stringstream s;
        write_mesh(m, s);
        const QuadMesh back = read_mesh(s);
        ASSERT_EQ(back.num_elements(), m.num_elements());
        ASSERT_EQ(back.num_vertices(), m.num_vertices());
        EXPECT_EQ(back.geometry_degree(), m.geometry_degree());
        for (Index v = 0; v < m.num_vertices(); ++v) {
            EXPECT_EQ(back.vertices()[v], m.vertices()[v]);
        }
        for (Index e = 0; e < m.num_elements(); ++e) {
            EXPECT_EQ(back.element(e), m.element(e));
            EXPECT_EQ(back.geometry_nodes(e), m.geometry_nodes(e));
            for (int k = 0; k < 4; ++k) {
                EXPECT_EQ(back.boundary_tag(e, k), m.boundary_tag(e, k));
            }
        }
        ASSERT_EQ(back.faces().size(), m.faces().size());
        for (std::size_t f = 0; f < m.faces().size(); ++f) {
            EXPECT_EQ(back.faces()[f].minus, m.faces()[f].minus);
            EXPECT_EQ(back.faces()[f].plus, m.faces()[f].plus);
            EXPECT_EQ(back.faces()[f].flip, m.faces()[f].flip);
            EXPECT_EQ(back.faces()[f].tag, m.faces()[f].tag);
        }
    }
}

TEST(MeshIo, Errors)
{
    std::istringstream cw(clockwise_mesh_text());
    try {
        (void)read_mesh(cw);
        FAIL() << "clockwise element accepted";
    } catch (const GeometryError& e) {
        EXPECT_NE(std::string(e.what()).find("element 0"), std::string::npos) << e.what();
    }
    std::istringstream bad_header("quadmesh 4\n");
    EXPECT_THROW((void)read_mesh(bad_header), ParseError);
    std::istringstream short_file("quadmesh 4 1 1\nv 0 0\nv 1 0\nv 1 1\ne 0 1 2 3\n");
    EXPECT_THROW((void)read_mesh(short_file), ParseError);
    std::istringstream bad_tag("quadmesh 4 1 1\nv 0 0\nv 1 0\nv 1 1\nv 0 1\ne 0 1 2 3\nb 0 0 sticky\n");
    try {
        (void)read_mesh(bad_tag);
        FAIL() << "unknown tag accepted";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)load_mesh("/nonexistent/x.mesh"), IoError);
}

TEST(MeshIo, BoundaryTags)
{
    EXPECT_EQ(parse_boundary_tag("Dirichlet"), BoundaryTag::Dirichlet);
    EXPECT_EQ(parse_boundary_tag("neumann"), BoundaryTag::Neumann);
    EXPECT_THROW((void)parse_boundary_tag("robin"), ArgumentError);
    const QuadMesh m = with_boundary_tag(cartesian_mesh(2, 2), BoundaryTag::Dirichlet);
    const auto on_boundary = m.boundary_vertices(BoundaryTag::Dirichlet);
    EXPECT_EQ(std::count(on_boundary.begin(), on_boundary.end(), true), 8);
}
