#include "sdgm/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sdgm {

namespace {

std::string lower(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string format_point(const Eigen::Vector2d& x)
{
    std::ostringstream os;
    os << std::setprecision(10) << "(" << x(0) << ", " << x(1) << ")";
    return os.str();
}

// Tensor geometry nodes of a straight-sided (bilinear) element.
Eigen::Matrix2Xd bilinear_nodes(const ReferenceElement& geo, const std::array<Eigen::Vector2d, 4>& corners)
{
    Eigen::Matrix2Xd out(2, geo.num_nodes());
    for (int a = 0; a < geo.num_nodes(); ++a) {
        const Eigen::Vector2d r = geo.node(a);
        const double s = 0.5 * (r(0) + 1.0);
        const double t = 0.5 * (r(1) + 1.0);
        out.col(a) = (1 - s) * (1 - t) * corners[0] + s * (1 - t) * corners[1] + s * t * corners[2] +
                     (1 - s) * t * corners[3];
    }
    return out;
}

constexpr int kEdgeSamples = 5;

} // namespace

std::string_view to_string(BoundaryTag tag)
{
    switch (tag) {
    case BoundaryTag::Neumann: return "neumann";
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::Periodic: return "periodic";
    }
    return "unknown";
}

BoundaryTag parse_boundary_tag(std::string_view text)
{
    const std::string t = lower(text);
    if (t == "neumann") {
        return BoundaryTag::Neumann;
    }
    if (t == "dirichlet") {
        return BoundaryTag::Dirichlet;
    }
    if (t == "periodic") {
        return BoundaryTag::Periodic;
    }
    throw ArgumentError("unknown boundary tag '" + std::string(text) + "'");
}

QuadMesh::QuadMesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<Index, 4>> elements,
                   int p_geo, std::vector<Eigen::Matrix2Xd> geometry_nodes)
    : vertices_(std::move(vertices)), elements_(std::move(elements)), p_geo_(p_geo),
      geometry_(std::move(geometry_nodes))
{
    if (p_geo_ < 1) {
        throw ArgumentError("QuadMesh: geometry degree must be >= 1");
    }
    if (elements_.empty()) {
        throw ArgumentError("QuadMesh: mesh has no elements");
    }
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        for (Index v : elements_[e]) {
            if (v < 0 || v >= num_vertices()) {
                throw ArgumentError("QuadMesh: element " + std::to_string(e) + " references vertex " +
                                    std::to_string(v) + " out of range");
            }
        }
    }
    geo_ref_ = std::make_shared<const ReferenceElement>(p_geo_);
    if (geometry_.empty()) {
        geometry_.reserve(elements_.size());
        for (const auto& el : elements_) {
            geometry_.push_back(bilinear_nodes(
                *geo_ref_, {vertices_[el[0]], vertices_[el[1]], vertices_[el[2]], vertices_[el[3]]}));
        }
    } else if (geometry_.size() != elements_.size()) {
        throw ArgumentError("QuadMesh: geometry node sets do not match the element count");
    }
    for (std::size_t e = 0; e < geometry_.size(); ++e) {
        if (geometry_[e].cols() != geo_ref_->num_nodes()) {
            throw ArgumentError("QuadMesh: element " + std::to_string(e) + " has " +
                                std::to_string(geometry_[e].cols()) + " geometry nodes, expected " +
                                std::to_string(geo_ref_->num_nodes()));
        }
    }
    tags_.assign(elements_.size(), {BoundaryTag::Neumann, BoundaryTag::Neumann, BoundaryTag::Neumann,
                                    BoundaryTag::Neumann});
    build_conforming_links();
    rebuild_faces();
    validate();
}

void QuadMesh::build_conforming_links()
{
    links_.assign(elements_.size(), {});
    std::map<std::pair<Index, Index>, std::vector<std::pair<Index, int>>> edges;
    for (Index e = 0; e < num_elements(); ++e) {
        for (int k = 0; k < 4; ++k) {
            const Index a = elements_[e][k];
            const Index b = elements_[e][(k + 1) % 4];
            if (a == b) {
                throw GeometryError("element " + std::to_string(e) + ": degenerate edge " + std::to_string(k));
            }
            edges[{std::min(a, b), std::max(a, b)}].emplace_back(e, k);
        }
    }
    for (const auto& [key, users] : edges) {
        if (users.size() > 2) {
            throw GeometryError("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                ") is shared by more than two elements");
        }
        if (users.size() == 2) {
            const auto [e1, k1] = users[0];
            const auto [e2, k2] = users[1];
            const bool flip = elements_[e1][k1] == elements_[e2][(k2 + 1) % 4];
            links_[e1][k1] = {e2, k2, flip, false};
            links_[e2][k2] = {e1, k1, flip, false};
        }
    }
}

// Orients every strip of elements joined through opposite edges (edge pairs
// {0, 2} and {1, 3}). Strips are visited from their lowest-indexed element,
// leaving it through local edge 2 or 1; each face in the strip gets the
// upstream element as its outflow (minus) side.
std::vector<std::array<signed char, 4>> QuadMesh::strip_orientation() const
{
    std::vector<std::array<signed char, 4>> out(elements_.size(), {-1, -1, -1, -1});
    for (Index e = 0; e < num_elements(); ++e) {
        for (int exit_edge : {2, 1}) {
            if (out[e][exit_edge] != -1) {
                continue;
            }
            Index cur = e;
            int edge = exit_edge;
            while (out[cur][edge] == -1) {
                out[cur][edge] = 1;
                const EdgeLink& l = links_[cur][edge];
                if (l.element < 0) {
                    break;
                }
                out[l.element][l.edge] = 0;
                cur = l.element;
                edge = (l.edge + 2) % 4;
            }
            cur = e;
            edge = (exit_edge + 2) % 4;
            while (out[cur][edge] == -1) {
                out[cur][edge] = 0;
                const EdgeLink& l = links_[cur][edge];
                if (l.element < 0) {
                    break;
                }
                out[l.element][l.edge] = 1;
                cur = l.element;
                edge = (l.edge + 2) % 4;
            }
        }
    }
    return out;
}

void QuadMesh::rebuild_faces()
{
    const auto outflow = strip_orientation();
    faces_.clear();
    face_index_.assign(elements_.size(), {-1, -1, -1, -1});
    for (Index e = 0; e < num_elements(); ++e) {
        for (int k = 0; k < 4; ++k) {
            const EdgeLink& l = links_[e][k];
            if (l.element < 0) {
                face_index_[e][k] = static_cast<Index>(faces_.size());
                faces_.push_back({e, k, -1, -1, false, tags_[e][k]});
                continue;
            }
            if (outflow[e][k] != 1) {
                continue;
            }
            if (outflow[l.element][l.edge] != 0) {
                throw GeometryError("inconsistent strip orientation at element " + std::to_string(e) +
                                    " edge " + std::to_string(k));
            }
            const Index id = static_cast<Index>(faces_.size());
            faces_.push_back({e, k, l.element, l.edge, l.flip,
                              l.periodic ? BoundaryTag::Periodic : BoundaryTag::Neumann});
            face_index_[e][k] = id;
            face_index_[l.element][l.edge] = id;
        }
    }
}

void QuadMesh::validate() const
{
    for (Index e = 0; e < num_elements(); ++e) {
        for (int a = 0; a < geo_ref_->num_nodes(); ++a) {
            const double det = jacobian(e, geo_ref_->node(a)).determinant();
            if (!(det > 0)) {
                throw GeometryError("element " + std::to_string(e) + ": nonpositive Jacobian " +
                                    std::to_string(det) + " at geometry node " + std::to_string(a) +
                                    " (elements must be counterclockwise and non-degenerate)");
            }
        }
    }
    const double scale = std::max(1.0, (bounding_max() - bounding_min()).norm());
    for (const Face& f : faces_) {
        if (f.boundary()) {
            continue;
        }
        Eigen::Vector2d shift = Eigen::Vector2d::Zero();
        for (int s = 0; s < kEdgeSamples; ++s) {
            const double t = -1.0 + 2.0 * s / (kEdgeSamples - 1);
            const Eigen::Vector2d xm = map(f.minus, edge_point(f.minus_edge, t));
            const Eigen::Vector2d xp = map(f.plus, edge_point(f.plus_edge, f.flip ? -t : t));
            if (s == 0) {
                shift = xp - xm;
                if (!f.periodic() && shift.norm() > 1e-10 * scale) {
                    throw GeometryError("elements " + std::to_string(f.minus) + " and " + std::to_string(f.plus) +
                                        " disagree on their shared edge at " + format_point(xm));
                }
            } else if ((xp - xm - shift).norm() > 1e-8 * scale) {
                throw GeometryError("elements " + std::to_string(f.minus) + " and " + std::to_string(f.plus) +
                                    " have mismatched edge geometry near " + format_point(xm));
            }
        }
    }
}

Index QuadMesh::num_boundary_faces() const noexcept
{
    return std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.boundary(); });
}

Index QuadMesh::num_interior_faces() const noexcept
{
    return static_cast<Index>(faces_.size()) - num_boundary_faces();
}

Eigen::Vector2d QuadMesh::map(Index e, const Eigen::Vector2d& ref) const
{
    return geometry_.at(e) * geo_ref_->tensor_basis_eval(ref(0), ref(1));
}

Eigen::Matrix2d QuadMesh::jacobian(Index e, const Eigen::Vector2d& ref) const
{
    return geometry_.at(e) * geo_ref_->tensor_basis_grad(ref(0), ref(1)).transpose();
}

double QuadMesh::element_area(Index e) const
{
    const auto rule = gauss_legendre<double>(p_geo_ + 2);
    double area = 0;
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
        for (Eigen::Index i = 0; i < rule.size(); ++i) {
            area += rule.weights(i) * rule.weights(j) *
                    jacobian(e, {rule.nodes(i), rule.nodes(j)}).determinant();
        }
    }
    return area;
}

double QuadMesh::area() const
{
    double total = 0;
    for (Index e = 0; e < num_elements(); ++e) {
        total += element_area(e);
    }
    return total;
}

double QuadMesh::edge_length(Index e, int edge) const
{
    const auto rule = gauss_legendre<double>(p_geo_ + 3);
    const Eigen::Vector2d dref = edge_tangent(edge);
    double length = 0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
        length += rule.weights(q) * (jacobian(e, edge_point(edge, rule.nodes(q))) * dref).norm();
    }
    return length;
}

Eigen::Vector2d QuadMesh::bounding_min() const
{
    Eigen::Vector2d lo = vertices_.front();
    for (const auto& g : geometry_) {
        lo = lo.cwiseMin(g.rowwise().minCoeff());
    }
    return lo;
}

Eigen::Vector2d QuadMesh::bounding_max() const
{
    Eigen::Vector2d hi = vertices_.front();
    for (const auto& g : geometry_) {
        hi = hi.cwiseMax(g.rowwise().maxCoeff());
    }
    return hi;
}

std::vector<bool> QuadMesh::boundary_vertices(BoundaryTag tag) const
{
    std::vector<bool> out(vertices_.size(), false);
    for (const Face& f : faces_) {
        if (f.boundary() && f.tag == tag) {
            out[elements_[f.minus][f.minus_edge]] = true;
            out[elements_[f.minus][(f.minus_edge + 1) % 4]] = true;
        }
    }
    return out;
}

void QuadMesh::pair_periodic(const std::vector<std::pair<Index, int>>& candidates, bool along_x, bool along_y)
{
    const Eigen::Vector2d lo = bounding_min();
    const Eigen::Vector2d hi = bounding_max();
    const Eigen::Vector2d extent = hi - lo;
    const double tol = 1e-8 * std::max(1.0, extent.maxCoeff());

    struct Side {
        Index e;
        int k;
        Eigen::Vector2d a;
        Eigen::Vector2d b;
    };
    auto endpoints = [&](Index e, int k) {
        return Side{e, k, map(e, edge_point(k, -1.0)), map(e, edge_point(k, 1.0))};
    };

    std::vector<bool> paired(candidates.size(), false);
    for (int axis = 0; axis < 2; ++axis) {
        if ((axis == 0 && !along_x) || (axis == 1 && !along_y)) {
            continue;
        }
        std::vector<std::size_t> low_side;
        std::vector<std::size_t> high_side;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (paired[c]) {
                continue;
            }
            const Side s = endpoints(candidates[c].first, candidates[c].second);
            if (std::abs(s.a(axis) - lo(axis)) < tol && std::abs(s.b(axis) - lo(axis)) < tol) {
                low_side.push_back(c);
            } else if (std::abs(s.a(axis) - hi(axis)) < tol && std::abs(s.b(axis) - hi(axis)) < tol) {
                high_side.push_back(c);
            }
        }
        Eigen::Vector2d shift = Eigen::Vector2d::Zero();
        shift(axis) = extent(axis);
        std::vector<bool> used(high_side.size(), false);
        for (std::size_t li : low_side) {
            const Side s = endpoints(candidates[li].first, candidates[li].second);
            bool found = false;
            for (std::size_t h = 0; h < high_side.size() && !found; ++h) {
                if (used[h]) {
                    continue;
                }
                const Side t = endpoints(candidates[high_side[h]].first, candidates[high_side[h]].second);
                bool flip = false;
                if ((s.a + shift - t.b).norm() < tol && (s.b + shift - t.a).norm() < tol) {
                    flip = true;
                } else if (!((s.a + shift - t.a).norm() < tol && (s.b + shift - t.b).norm() < tol)) {
                    continue;
                }
                const double ls = edge_length(s.e, s.k);
                const double lt = edge_length(t.e, t.k);
                if (std::abs(ls - lt) > 1e-10 * std::max(1.0, ls)) {
                    throw PairingError("periodic faces " + format_point(s.a) + "-" + format_point(s.b) +
                                       " and " + format_point(t.a) + "-" + format_point(t.b) +
                                       " have different lengths");
                }
                links_[s.e][s.k] = {t.e, t.k, flip, true};
                links_[t.e][t.k] = {s.e, s.k, flip, true};
                tags_[s.e][s.k] = BoundaryTag::Periodic;
                tags_[t.e][t.k] = BoundaryTag::Periodic;
                used[h] = true;
                paired[li] = true;
                paired[high_side[h]] = true;
                found = true;
            }
            if (!found) {
                throw PairingError("no periodic partner for boundary face " + format_point(s.a) + " - " +
                                   format_point(s.b) + " along " + (axis == 0 ? "x" : "y"));
            }
        }
        for (std::size_t h = 0; h < high_side.size(); ++h) {
            if (!used[h]) {
                const Side t = endpoints(candidates[high_side[h]].first, candidates[high_side[h]].second);
                throw PairingError("no periodic partner for boundary face " + format_point(t.a) + " - " +
                                   format_point(t.b) + " along " + (axis == 0 ? "x" : "y"));
            }
        }
    }
    rebuild_faces();
    validate();
}

QuadMesh apply_periodic(QuadMesh mesh, bool periodic_x, bool periodic_y)
{
    std::vector<std::pair<Index, int>> candidates;
    for (const Face& f : mesh.faces()) {
        if (f.boundary()) {
            candidates.emplace_back(f.minus, f.minus_edge);
        }
    }
    mesh.pair_periodic(candidates, periodic_x, periodic_y);
    return mesh;
}

QuadMesh with_boundary_tag(QuadMesh mesh, BoundaryTag tag)
{
    if (tag == BoundaryTag::Periodic) {
        throw ArgumentError("with_boundary_tag: use apply_periodic to create periodic faces");
    }
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        for (int k = 0; k < 4; ++k) {
            if (mesh.links_[e][k].element < 0) {
                mesh.tags_[e][k] = tag;
            }
        }
    }
    mesh.rebuild_faces();
    return mesh;
}

QuadMesh cartesian_mesh(int nx, int ny, const Rectangle& domain, BoundaryTag tag)
{
    if (nx < 1 || ny < 1) {
        throw ArgumentError("cartesian_mesh: nx and ny must be >= 1");
    }
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
        throw ArgumentError("cartesian_mesh: degenerate rectangle");
    }
    std::vector<Eigen::Vector2d> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            // Exact endpoints so opposite sides match bitwise.
            const double x = i == nx ? domain.x1 : domain.x0 + (domain.x1 - domain.x0) * i / nx;
            const double y = j == ny ? domain.y1 : domain.y0 + (domain.y1 - domain.y0) * j / ny;
            vertices.emplace_back(x, y);
        }
    }
    std::vector<std::array<Index, 4>> elements;
    elements.reserve(static_cast<std::size_t>(nx * ny));
    const auto vid = [nx](int i, int j) { return static_cast<Index>(i + (nx + 1) * j); };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    QuadMesh mesh(std::move(vertices), std::move(elements));
    if (tag == BoundaryTag::Periodic) {
        return apply_periodic(std::move(mesh), true, true);
    }
    return tag == BoundaryTag::Neumann ? mesh : with_boundary_tag(std::move(mesh), tag);
}

QuadMesh annulus_mesh(int n_radial, int n_angular, double r_inner, double r_outer, double warp_amplitude,
                      int p_geo)
{
    if (!(r_inner > 0) || !(r_outer > r_inner)) {
        throw ArgumentError("annulus_mesh: need 0 < r_inner < r_outer");
    }
    if (n_radial < 1 || n_angular < 3) {
        throw ArgumentError("annulus_mesh: need n_radial >= 1 and n_angular >= 3");
    }
    if (p_geo < 1) {
        throw ArgumentError("annulus_mesh: geometry degree must be >= 1");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const auto place = [&](double r, double theta) -> Eigen::Vector2d {
        const double radius = r * (1.0 + warp_amplitude * std::sin(2.0 * theta));
        return {radius * std::cos(theta), radius * std::sin(theta)};
    };
    const auto radius_at = [&](double s) { return r_inner + (r_outer - r_inner) * s / n_radial; };
    const auto angle_at = [&](double s) { return two_pi * s / n_angular; };

    std::vector<Eigen::Vector2d> vertices;
    for (int it = 0; it < n_angular; ++it) {
        for (int ir = 0; ir <= n_radial; ++ir) {
            vertices.push_back(place(radius_at(ir), angle_at(it)));
        }
    }
    const auto vid = [n_radial, n_angular](int ir, int it) {
        return static_cast<Index>(ir + (n_radial + 1) * (it % n_angular));
    };
    const ReferenceElement geo(p_geo);
    std::vector<std::array<Index, 4>> elements;
    std::vector<Eigen::Matrix2Xd> geometry;
    for (int it = 0; it < n_angular; ++it) {
        for (int ir = 0; ir < n_radial; ++ir) {
            elements.push_back({vid(ir, it), vid(ir + 1, it), vid(ir + 1, it + 1), vid(ir, it + 1)});
            Eigen::Matrix2Xd nodes(2, geo.num_nodes());
            for (int a = 0; a < geo.num_nodes(); ++a) {
                const Eigen::Vector2d ref = geo.node(a);
                nodes.col(a) = place(radius_at(ir + 0.5 * (ref(0) + 1.0)), angle_at(it + 0.5 * (ref(1) + 1.0)));
            }
            geometry.push_back(std::move(nodes));
        }
    }
    return QuadMesh(std::move(vertices), std::move(elements), p_geo, std::move(geometry));
}

QuadMesh read_mesh(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](std::istringstream& tokens) {
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') {
                continue;
            }
            tokens = std::istringstream(line);
            return true;
        }
        return false;
    };

    std::istringstream tokens;
    if (!next_line(tokens)) {
        throw ParseError(line_no, "empty mesh file");
    }
    std::string keyword;
    Index nv = 0;
    Index ne = 0;
    int p_geo = 0;
    if (!(tokens >> keyword >> nv >> ne >> p_geo) || keyword != "quadmesh" || nv < 1 || ne < 1 || p_geo < 1) {
        throw ParseError(line_no, "expected header 'quadmesh <n_vertices> <n_elements> <p_geo>'");
    }
    const int n_geo = (p_geo + 1) * (p_geo + 1);

    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<Index, 4>> elements;
    std::vector<Eigen::Matrix2Xd> geometry;
    struct Tag {
        Index e;
        int k;
        BoundaryTag tag;
        std::size_t line;
    };
    std::vector<Tag> tags;

    while (next_line(tokens)) {
        tokens >> keyword;
        if (keyword == "v") {
            Eigen::Vector2d x;
            if (!(tokens >> x(0) >> x(1))) {
                throw ParseError(line_no, "expected 'v x y'");
            }
            vertices.push_back(x);
        } else if (keyword == "e") {
            std::array<Index, 4> el{};
            if (!(tokens >> el[0] >> el[1] >> el[2] >> el[3])) {
                throw ParseError(line_no, "expected 'e i0 i1 i2 i3'");
            }
            elements.push_back(el);
            if (p_geo > 1) {
                Eigen::Matrix2Xd nodes(2, n_geo);
                for (int a = 0; a < n_geo; ++a) {
                    if (!(tokens >> nodes(0, a) >> nodes(1, a))) {
                        throw ParseError(line_no, "expected " + std::to_string(n_geo) + " geometry nodes");
                    }
                }
                geometry.push_back(std::move(nodes));
            }
        } else if (keyword == "b") {
            Index e = -1;
            int k = -1;
            std::string name;
            if (!(tokens >> e >> k >> name)) {
                throw ParseError(line_no, "expected 'b <element> <local_edge> <tag>'");
            }
            try {
                tags.push_back({e, k, parse_boundary_tag(name), line_no});
            } catch (const ArgumentError& err) {
                throw ParseError(line_no, err.what());
            }
        } else {
            throw ParseError(line_no, "unknown record '" + keyword + "'");
        }
        std::string extra;
        if (tokens >> extra) {
            throw ParseError(line_no, "trailing data '" + extra + "'");
        }
    }
    if (static_cast<Index>(vertices.size()) != nv) {
        throw ParseError(line_no, "header declares " + std::to_string(nv) + " vertices, found " +
                                      std::to_string(vertices.size()));
    }
    if (static_cast<Index>(elements.size()) != ne) {
        throw ParseError(line_no, "header declares " + std::to_string(ne) + " elements, found " +
                                      std::to_string(elements.size()));
    }

    QuadMesh mesh(std::move(vertices), std::move(elements), p_geo, std::move(geometry));
    std::vector<std::pair<Index, int>> periodic;
    for (const Tag& t : tags) {
        if (t.e < 0 || t.e >= mesh.num_elements() || t.k < 0 || t.k > 3) {
            throw ParseError(t.line, "boundary tag refers to a nonexistent element edge");
        }
        if (mesh.links_[t.e][t.k].element >= 0) {
            throw ParseError(t.line, "boundary tag on interior edge " + std::to_string(t.k) + " of element " +
                                         std::to_string(t.e));
        }
        if (t.tag == BoundaryTag::Periodic) {
            periodic.emplace_back(t.e, t.k);
        } else {
            mesh.tags_[t.e][t.k] = t.tag;
        }
    }
    mesh.rebuild_faces();
    if (!periodic.empty()) {
        mesh.pair_periodic(periodic, true, true);
    }
    return mesh;
}

void write_mesh(const QuadMesh& mesh, std::ostream& out)
{
    out << "quadmesh " << mesh.num_vertices() << ' ' << mesh.num_elements() << ' ' << mesh.geometry_degree()
        << '\n';
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices()) {
        out << "v " << v(0) << ' ' << v(1) << '\n';
    }
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.element(e);
        out << "e " << el[0] << ' ' << el[1] << ' ' << el[2] << ' ' << el[3];
        if (mesh.curved()) {
            const auto& g = mesh.geometry_nodes(e);
            for (Eigen::Index a = 0; a < g.cols(); ++a) {
                out << ' ' << g(0, a) << ' ' << g(1, a);
            }
        }
        out << '\n';
    }
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        for (int k = 0; k < 4; ++k) {
            const EdgeLink& l = mesh.link(e, k);
            if (l.element < 0 || l.periodic) {
                out << "b " << e << ' ' << k << ' ' << to_string(mesh.boundary_tag(e, k)) << '\n';
            }
        }
    }
}

QuadMesh load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open mesh file '" + path + "'");
    }
    return read_mesh(in);
}

void save_mesh(const QuadMesh& mesh, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write mesh file '" + path + "'");
    }
    write_mesh(mesh, out);
    if (!out) {
        throw IoError("write failed for mesh file '" + path + "'");
    }
}

} // namespace sdgm
