#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sdgm/reference_element.hpp"

namespace sdgm {

using Index = Eigen::Index;

enum class BoundaryTag : std::uint8_t { Neumann, Dirichlet, Periodic };

[[nodiscard]] std::string_view to_string(BoundaryTag tag);
/// Accepts "neumann", "dirichlet", "periodic" (case-insensitive).
[[nodiscard]] BoundaryTag parse_boundary_tag(std::string_view text);

struct Rectangle {
    double x0 = 0;
    double y0 = 0;
    double x1 = 1;
    double y1 = 1;
};

/// One mesh face. Interior and periodic faces have both sides; boundary
/// faces have plus < 0 and the unique element as minus. The LDG trace
/// u-hat comes from the minus side.
///
/// Minus/plus roles follow the element strips (chains of elements joined
/// through opposite edges): each strip is oriented from its lowest-indexed
/// element out through local edge 2 (strip across edges 0/2) or local
/// edge 1 (strip across edges 1/3), and the upstream element of every face
/// is minus. Each element is then minus on one face and plus on the other
/// in each of its two edge pairs, even when a strip closes on itself through
/// a periodic pairing. On Cartesian meshes this is "lower index is minus".
struct Face {
    Index minus = -1;
    int minus_edge = -1;
    Index plus = -1;
    int plus_edge = -1;
    /// true when the plus-side edge parameter runs opposite to the minus side.
    bool flip = false;
    BoundaryTag tag = BoundaryTag::Neumann;

    [[nodiscard]] bool boundary() const noexcept { return plus < 0; }
    [[nodiscard]] bool periodic() const noexcept { return tag == BoundaryTag::Periodic; }
};

/// Neighbor across local edge k of an element.
struct EdgeLink {
    Index element = -1;
    int edge = -1;
    bool flip = false;
    bool periodic = false;
};

/// Quadrilateral mesh with optional isoparametric geometry of degree p_geo.
///
/// Vertices of each element are listed counterclockwise; reference corners
/// (-1,-1), (1,-1), (1,1), (-1,1) map to vertices 0..3. Local edge k runs
/// from vertex k to vertex k+1. Geometry nodes sit at the tensor
/// Gauss-Lobatto points of degree p_geo; for p_geo = 1 they are the vertices.
class QuadMesh {
public:
    QuadMesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<Index, 4>> elements,
             int p_geo = 1, std::vector<Eigen::Matrix2Xd> geometry_nodes = {});

    [[nodiscard]] Index num_vertices() const noexcept { return static_cast<Index>(vertices_.size()); }
    [[nodiscard]] Index num_elements() const noexcept { return static_cast<Index>(elements_.size()); }
    [[nodiscard]] int geometry_degree() const noexcept { return p_geo_; }
    [[nodiscard]] bool curved() const noexcept { return p_geo_ > 1; }

    [[nodiscard]] const std::vector<Eigen::Vector2d>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::array<Index, 4>& element(Index e) const { return elements_.at(e); }
    [[nodiscard]] const Eigen::Matrix2Xd& geometry_nodes(Index e) const { return geometry_.at(e); }
    [[nodiscard]] const ReferenceElement& geometry_element() const noexcept { return *geo_ref_; }

    [[nodiscard]] const std::vector<Face>& faces() const noexcept { return faces_; }
    [[nodiscard]] Index face_of(Index e, int edge) const { return face_index_.at(e)[edge]; }
    [[nodiscard]] const EdgeLink& link(Index e, int edge) const { return links_.at(e)[edge]; }
    [[nodiscard]] BoundaryTag boundary_tag(Index e, int edge) const { return tags_.at(e)[edge]; }
    [[nodiscard]] Index num_boundary_faces() const noexcept;
    [[nodiscard]] Index num_interior_faces() const noexcept;

    /// Physical point of reference coordinates (xi, eta) on element e.
    [[nodiscard]] Eigen::Vector2d map(Index e, const Eigen::Vector2d& ref) const;
    /// d(x, y)/d(xi, eta) at (xi, eta).
    [[nodiscard]] Eigen::Matrix2d jacobian(Index e, const Eigen::Vector2d& ref) const;

    [[nodiscard]] double element_area(Index e) const;
    [[nodiscard]] double area() const;
    [[nodiscard]] double edge_length(Index e, int edge) const;
    [[nodiscard]] Eigen::Vector2d bounding_min() const;
    [[nodiscard]] Eigen::Vector2d bounding_max() const;

    /// Vertices that lie on a non-periodic boundary face with the given tag.
    [[nodiscard]] std::vector<bool> boundary_vertices(BoundaryTag tag) const;

    friend QuadMesh with_boundary_tag(QuadMesh mesh, BoundaryTag tag);
    friend QuadMesh apply_periodic(QuadMesh mesh, bool periodic_x, bool periodic_y);
    friend QuadMesh read_mesh(std::istream& in);

private:
    void build_conforming_links();
    void rebuild_faces();
    [[nodiscard]] std::vector<std::array<signed char, 4>> strip_orientation() const;
    void validate() const;
    void pair_periodic(const std::vector<std::pair<Index, int>>& candidates, bool along_x, bool along_y);

    std::vector<Eigen::Vector2d> vertices_;
    std::vector<std::array<Index, 4>> elements_;
    int p_geo_;
    std::shared_ptr<const ReferenceElement> geo_ref_;
    std::vector<Eigen::Matrix2Xd> geometry_;
    std::vector<std::array<EdgeLink, 4>> links_;
    std::vector<std::array<BoundaryTag, 4>> tags_;
    std::vector<Face> faces_;
    std::vector<std::array<Index, 4>> face_index_;
};

/// nx x ny congruent rectangles; every boundary face gets the given tag.
QuadMesh cartesian_mesh(int nx, int ny, const Rectangle& domain = {}, BoundaryTag tag = BoundaryTag::Neumann);

/// Pair boundary faces on opposite sides of the bounding box that coincide
/// under translation; paired faces become interior periodic faces.
QuadMesh apply_periodic(QuadMesh mesh, bool periodic_x, bool periodic_y);

/// Retag every non-periodic boundary face.
QuadMesh with_boundary_tag(QuadMesh mesh, BoundaryTag tag);

/// Warped annulus: reference (xi, eta) -> (r, theta) -> radius r (1 + a sin 2 theta)
/// at angle theta. The angular direction closes through shared vertices;
/// both circles are tagged Neumann.
QuadMesh annulus_mesh(int n_radial, int n_angular, double r_inner, double r_outer,
                      double warp_amplitude = 0.1, int p_geo = 1);

QuadMesh read_mesh(std::istream& in);
void write_mesh(const QuadMesh& mesh, std::ostream& out);
QuadMesh load_mesh(const std::string& path);
void save_mesh(const QuadMesh& mesh, const std::string& path);

} // namespace sdgm
