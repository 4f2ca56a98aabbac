#include "sdgm/operators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "sdgm/errors.hpp"
#include "sdgm/parallel.hpp"

namespace sdgm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(Regime regime)
{
    switch (regime) {
    case Regime::Periodic: return "periodic";
    case Regime::Neumann: return "neumann";
    case Regime::DirichletWeak: return "dirichlet_weak";
    case Regime::DirichletStrong: return "dirichlet_strong";
    }
    return "?";
}

Regime parse_regime(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Regime r : {Regime::Periodic, Regime::Neumann, Regime::DirichletWeak, Regime::DirichletStrong}) {
        if (s == to_string(r)) {
            return r;
        }
    }
    throw ArgumentError("unknown regime '" + std::string(text) +
                        "' (expected periodic, neumann, dirichlet_weak or dirichlet_strong)");
}

// ---------------------------------------------------------------------------
// ElementBlockMatrix

ElementBlockMatrix::ElementBlockMatrix(Index n_elements, Index block_size)
    : block_size_(block_size), blocks_(n_elements, MatrixXd::Zero(block_size, block_size))
{
}

void ElementBlockMatrix::apply(const VectorXd& x, VectorXd& y, int components) const
{
    const Index n = num_blocks();
    const Index bs = block_size_;
    if (x.size() != n * bs * components) {
        throw ArgumentError("ElementBlockMatrix::apply: vector length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(n * bs * components));
    }
    y.resize(x.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMinElements)
    for (Index e = 0; e < n; ++e) {
        for (int c = 0; c < components; ++c) {
            const Index off = (e * components + c) * bs;
            y.segment(off, bs).noalias() = blocks_[e] * x.segment(off, bs);
        }
    }
}

VectorXd ElementBlockMatrix::operator*(const VectorXd& x) const
{
    VectorXd y;
    apply(x, y);
    return y;
}

bool ElementBlockMatrix::is_zero() const
{
    return std::all_of(blocks_.begin(), blocks_.end(), [](const MatrixXd& b) { return (b.array() == 0).all(); });
}

MatrixXd ElementBlockMatrix::dense() const
{
    MatrixXd out = MatrixXd::Zero(rows(), rows());
    for (Index e = 0; e < num_blocks(); ++e) {
        out.block(e * block_size_, e * block_size_, block_size_, block_size_) = blocks_[e];
    }
    return out;
}

// ---------------------------------------------------------------------------
// BlockSparseOperator

BlockSparseOperator::BlockSparseOperator(Index n_elements, Index row_block, Index col_block)
    : n_elements_(n_elements),
      row_block_(row_block),
      col_block_(col_block),
      diagonal_(n_elements, MatrixXd::Zero(row_block, col_block))
{
}

void BlockSparseOperator::add_coupling(Index row_element, Index col_element, MatrixXd block)
{
    if (block.rows() != row_block_ || block.cols() != col_block_) {
        throw ArgumentError("BlockSparseOperator::add_coupling: block shape mismatch");
    }
    couplings_.push_back({row_element, col_element, std::move(block)});
}

void BlockSparseOperator::finalize()
{
    by_row_.assign(n_elements_, {});
    by_col_.assign(n_elements_, {});
    for (Index k = 0; k < static_cast<Index>(couplings_.size()); ++k) {
        by_row_[couplings_[k].row_element].push_back(k);
        by_col_[couplings_[k].col_element].push_back(k);
    }
}

void BlockSparseOperator::apply(const VectorXd& x, VectorXd& y) const
{
    if (x.size() != cols()) {
        throw ArgumentError("BlockSparseOperator::apply: vector length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(cols()));
    }
    y.resize(rows());
#pragma omp parallel for schedule(static) if (n_elements_ >= kParallelMinElements)
    for (Index e = 0; e < n_elements_; ++e) {
        auto ye = y.segment(e * row_block_, row_block_);
        ye.noalias() = diagonal_[e] * x.segment(e * col_block_, col_block_);
        for (Index k : by_row_[e]) {
            const Coupling& c = couplings_[k];
            ye.noalias() += c.block * x.segment(c.col_element * col_block_, col_block_);
        }
    }
}

void BlockSparseOperator::apply_transpose(const VectorXd& x, VectorXd& y) const
{
    if (x.size() != rows()) {
        throw ArgumentError("BlockSparseOperator::apply_transpose: vector length " +
                            std::to_string(x.size()) + ", expected " + std::to_string(rows()));
    }
    y.resize(cols());
#pragma omp parallel for schedule(static) if (n_elements_ >= kParallelMinElements)
    for (Index e = 0; e < n_elements_; ++e) {
        auto ye = y.segment(e * col_block_, col_block_);
        ye.noalias() = diagonal_[e].transpose() * x.segment(e * row_block_, row_block_);
        for (Index k : by_col_[e]) {
            const Coupling& c = couplings_[k];
            ye.noalias() += c.block.transpose() * x.segment(c.row_element * row_block_, row_block_);
        }
    }
}

MatrixXd BlockSparseOperator::dense() const
{
    MatrixXd out = MatrixXd::Zero(rows(), cols());
    for (Index e = 0; e < n_elements_; ++e) {
        out.block(e * row_block_, e * col_block_, row_block_, col_block_) += diagonal_[e];
    }
    for (const Coupling& c : couplings_) {
        out.block(c.row_element * row_block_, c.col_element * col_block_, row_block_, col_block_) += c.block;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// Gauss-Legendre rule with p + p_geo points per direction. The mapped
// integrands of M, D and G are polynomials of degree at most
// 2p + 2p_geo - 1 per direction (n ds and |J| J^{-1} are polynomial in the
// geometry), so this rule integrates them exactly. For straight-sided
// elements it is the reference element's own (p + 1)-point rule.
QuadratureRule<double> assembly_rule(const QuadMesh& mesh, const ReferenceElement& ref)
{
    return gauss_legendre<double>(ref.degree() + mesh.geometry_degree());
}

// Basis and physical geometry at the volume quadrature points of one element.
struct VolumeGeometry {
    VectorXd weight;  // quadrature weight times |J|
    MatrixXd dx;      // d(phi_a)/dx at each point (points x nodes)
    MatrixXd dy;
};

class VolumeEvaluator {
public:
    VolumeEvaluator(const QuadMesh& mesh, const ReferenceElement& ref)
        : mesh_(mesh),
          rule_(assembly_rule(mesh, ref)),
          basis_(ref.evaluate_on_tensor_grid(rule_.nodes)),
          geo_(mesh.geometry_element().evaluate_on_tensor_grid(rule_.nodes))
    {
        const auto& w = rule_.weights;
        const Index m = w.size();
        w2_.resize(m * m);
        for (Index j = 0; j < m; ++j) {
            for (Index i = 0; i < m; ++i) {
                w2_(i + m * j) = w(i) * w(j);
            }
        }
    }

    [[nodiscard]] const MatrixXd& values() const { return basis_.values; }

    [[nodiscard]] VolumeGeometry evaluate(Index e) const
    {
        const Eigen::Matrix2Xd& X = mesh_.geometry_nodes(e);
        const VectorXd x_xi = geo_.d_xi * X.row(0).transpose();
        const VectorXd x_eta = geo_.d_eta * X.row(0).transpose();
        const VectorXd y_xi = geo_.d_xi * X.row(1).transpose();
        const VectorXd y_eta = geo_.d_eta * X.row(1).transpose();
        const VectorXd det = x_xi.cwiseProduct(y_eta) - x_eta.cwiseProduct(y_xi);
        if ((det.array() <= 0).any()) {
            throw GeometryError("element " + std::to_string(e) +
                                ": nonpositive Jacobian at a quadrature point");
        }
        // Inverse Jacobian: xi_x = y_eta/det, xi_y = -x_eta/det, eta_x = -y_xi/det, eta_y = x_xi/det.
        const VectorXd xi_x = y_eta.cwiseQuotient(det);
        const VectorXd xi_y = -x_eta.cwiseQuotient(det);
        const VectorXd eta_x = -y_xi.cwiseQuotient(det);
        const VectorXd eta_y = x_xi.cwiseQuotient(det);
        VolumeGeometry g;
        g.weight = w2_.cwiseProduct(det);
        g.dx = xi_x.asDiagonal() * basis_.d_xi + eta_x.asDiagonal() * basis_.d_eta;
        g.dy = xi_y.asDiagonal() * basis_.d_xi + eta_y.asDiagonal() * basis_.d_eta;
        return g;
    }

private:
    const QuadMesh& mesh_;
    QuadratureRule<double> rule_;
    ReferenceElement::TensorEvaluation basis_;
    ReferenceElement::TensorEvaluation geo_;
    VectorXd w2_;
};

// Edge quadrature on the minus side of a face: outward normal times the
// line element, one row per quadrature point.
Eigen::MatrixX2d scaled_normals(const QuadMesh& mesh, Index e, int edge, const QuadratureRule<double>& rule)
{
    Eigen::MatrixX2d out(rule.size(), 2);
    const Eigen::Vector2d dref = edge_tangent(edge);
    for (Index q = 0; q < rule.size(); ++q) {
        const Eigen::Vector2d t = mesh.jacobian(e, edge_point(edge, rule.nodes(q))) * dref;
        out(q, 0) = t(1) * rule.weights(q);
        out(q, 1) = -t(0) * rule.weights(q);
    }
    return out;
}

struct FaceTraces {
    MatrixXd minus;  // quadrature points x nodes
    MatrixXd plus;
    Eigen::MatrixX2d nds;
};

FaceTraces face_traces(const QuadMesh& mesh, const ReferenceElement& ref, const Face& f)
{
    const auto rule = assembly_rule(mesh, ref);
    FaceTraces tr;
    tr.minus = ref.evaluate_on_edge(f.minus_edge, rule.nodes);
    if (!f.boundary()) {
        tr.plus = ref.evaluate_on_edge(f.plus_edge, f.flip ? VectorXd(-rule.nodes) : rule.nodes);
    }
    tr.nds = scaled_normals(mesh, f.minus, f.minus_edge, rule);
    return tr;
}

bool dirichlet_face(const Face& f)
{
    return f.boundary() && f.tag == BoundaryTag::Dirichlet;
}

// Places a (nloc x nloc) block for vector component c into a (2 nloc)-wide column range.
void put_columns(MatrixXd& target, int c, const MatrixXd& block, double sign = 1)
{
    const Index n = block.cols();
    target.middleCols(c * n, n) += sign * block;
}

void put_rows(MatrixXd& target, int c, const MatrixXd& block, double sign = 1)
{
    const Index n = block.rows();
    target.middleRows(c * n, n) += sign * block;
}

} // namespace

ElementBlockMatrix assemble_mass(const QuadMesh& mesh, const ReferenceElement& ref)
{
    const Index n = mesh.num_elements();
    const VolumeEvaluator vol(mesh, ref);
    ElementBlockMatrix M(n, ref.num_nodes());
    parallel_for(n, [&](Index e) {
        const VolumeGeometry g = vol.evaluate(e);
        M.block(e).noalias() = vol.values().transpose() * g.weight.asDiagonal() * vol.values();
    });
    return M;
}

BlockSparseOperator assemble_divergence(const QuadMesh& mesh, const ReferenceElement& ref,
                                        const LdgParameters&, Regime)
{
    const Index n = mesh.num_elements();
    const Index nloc = ref.num_nodes();
    BlockSparseOperator D(n, nloc, 2 * nloc);
    const VolumeEvaluator vol(mesh, ref);

    // -int sigma . grad v
    parallel_for(n, [&](Index e) {
        const VolumeGeometry g = vol.evaluate(e);
        const MatrixXd wb = g.weight.asDiagonal() * vol.values();
        put_columns(D.diagonal(e), 0, g.dx.transpose() * wb, -1);
        put_columns(D.diagonal(e), 1, g.dy.transpose() * wb, -1);
    });

    // sigma-hat . [[v]] with [[v]] = (v- - v+) n-.
    for (const Face& f : mesh.faces()) {
        if (f.boundary() && !dirichlet_face(f)) {
            continue;  // homogeneous Neumann data: sigma-hat . n = 0
        }
        const FaceTraces tr = face_traces(mesh, ref, f);
        if (f.boundary()) {
            // sigma-hat = sigma- on Dirichlet faces (C11 acts on u only).
            for (int c = 0; c < 2; ++c) {
                put_columns(D.diagonal(f.minus), c, tr.minus.transpose() * tr.nds.col(c).asDiagonal() * tr.minus);
            }
            continue;
        }
        // sigma-hat = sigma+ on interior faces.
        MatrixXd coupling = MatrixXd::Zero(nloc, 2 * nloc);
        for (int c = 0; c < 2; ++c) {
            put_columns(coupling, c, tr.minus.transpose() * tr.nds.col(c).asDiagonal() * tr.plus);
            put_columns(D.diagonal(f.plus), c, tr.plus.transpose() * tr.nds.col(c).asDiagonal() * tr.plus, -1);
        }
        D.add_coupling(f.minus, f.plus, std::move(coupling));
    }
    D.finalize();
    return D;
}

BlockSparseOperator assemble_gradient(const QuadMesh& mesh, const ReferenceElement& ref,
                                      const LdgParameters&, Regime)
{
    const Index n = mesh.num_elements();
    const Index nloc = ref.num_nodes();
    BlockSparseOperator G(n, 2 * nloc, nloc);
    const VolumeEvaluator vol(mesh, ref);

    // -int u div tau
    parallel_for(n, [&](Index e) {
        const VolumeGeometry g = vol.evaluate(e);
        const MatrixXd wb = g.weight.asDiagonal() * vol.values();
        put_rows(G.diagonal(e), 0, g.dx.transpose() * wb, -1);
        put_rows(G.diagonal(e), 1, g.dy.transpose() * wb, -1);
    });

    // u-hat [[tau]] with u-hat = u-.
    for (const Face& f : mesh.faces()) {
        if (dirichlet_face(f)) {
            continue;  // u-hat = g_D = 0
        }
        const FaceTraces tr = face_traces(mesh, ref, f);
        if (f.boundary()) {
            for (int c = 0; c < 2; ++c) {
                put_rows(G.diagonal(f.minus), c, tr.minus.transpose() * tr.nds.col(c).asDiagonal() * tr.minus);
            }
            continue;
        }
        MatrixXd coupling = MatrixXd::Zero(2 * nloc, nloc);
        for (int c = 0; c < 2; ++c) {
            put_rows(G.diagonal(f.minus), c, tr.minus.transpose() * tr.nds.col(c).asDiagonal() * tr.minus);
            put_rows(coupling, c, tr.plus.transpose() * tr.nds.col(c).asDiagonal() * tr.minus, -1);
        }
        G.add_coupling(f.plus, f.minus, std::move(coupling));
    }
    G.finalize();
    return G;
}

ElementBlockMatrix assemble_penalty(const QuadMesh& mesh, const ReferenceElement& ref,
                                    const LdgParameters& params, Regime regime)
{
    ElementBlockMatrix E(mesh.num_elements(), ref.num_nodes());
    if (regime != Regime::DirichletWeak || params.c11_scale == 0) {
        return E;
    }
    const double p1 = ref.degree() + 1;
    for (const Face& f : mesh.faces()) {
        if (!dirichlet_face(f)) {
            continue;
        }
        const FaceTraces tr = face_traces(mesh, ref, f);
        const double c11 = params.c11_scale * p1 * p1 / mesh.edge_length(f.minus, f.minus_edge);
        const VectorXd ds = tr.nds.rowwise().norm();
        E.block(f.minus) -= c11 * tr.minus.transpose() * ds.asDiagonal() * tr.minus;
    }
    return E;
}

std::vector<BoundaryFaceQuadrature> boundary_quadrature(const QuadMesh& mesh, const ReferenceElement& ref)
{
    const auto rule = assembly_rule(mesh, ref);
    std::vector<BoundaryFaceQuadrature> out;
    for (const Face& f : mesh.faces()) {
        if (!f.boundary()) {
            continue;
        }
        BoundaryFaceQuadrature q;
        q.element = f.minus;
        q.edge = f.minus_edge;
        q.tag = f.tag;
        q.basis = ref.evaluate_on_edge(f.minus_edge, rule.nodes);
        const Eigen::MatrixX2d nds = scaled_normals(mesh, f.minus, f.minus_edge, rule);
        q.ds = nds.rowwise().norm();
        q.normals = (nds.array().colwise() / q.ds.array()).matrix().transpose();
        q.points.resize(2, rule.size());
        for (Index k = 0; k < rule.size(); ++k) {
            q.points.col(k) = mesh.map(f.minus, edge_point(f.minus_edge, rule.nodes(k)));
        }
        q.length = q.ds.sum();
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Index> boundary_dofs(const QuadMesh& mesh, const ReferenceElement& ref)
{
    const Index nloc = ref.num_nodes();
    const int p = ref.degree();
    const std::vector<bool> on_boundary = mesh.boundary_vertices(BoundaryTag::Dirichlet);
    const std::array<int, 4> corner{ref.node_index(0, 0), ref.node_index(p, 0), ref.node_index(p, p),
                                    ref.node_index(0, p)};
    std::vector<Index> out;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        std::vector<bool> mark(nloc, false);
        for (int k = 0; k < 4; ++k) {
            if (mesh.link(e, k).element < 0 && mesh.boundary_tag(e, k) == BoundaryTag::Dirichlet) {
                for (int a : ref.edge_nodes(k)) {
                    mark[a] = true;
                }
            }
            if (on_boundary[mesh.element(e)[k]]) {
                mark[corner[k]] = true;
            }
        }
        for (Index a = 0; a < nloc; ++a) {
            if (mark[a]) {
                out.push_back(e * nloc + a);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// DgDiscretization

DgDiscretization::DgDiscretization(QuadMesh mesh, int p, Regime regime, LdgParameters params)
    : mesh_(std::move(mesh)), ref_(p), regime_(regime), params_(params)
{
    Index n_dirichlet = 0;
    for (const Face& f : mesh_.faces()) {
        n_dirichlet += dirichlet_face(f) ? 1 : 0;
    }
    switch (regime_) {
    case Regime::Periodic:
        if (mesh_.num_boundary_faces() != 0) {
            throw ConfigurationError("periodic regime: mesh has " + std::to_string(mesh_.num_boundary_faces()) +
                                     " unpaired boundary faces");
        }
        break;
    case Regime::Neumann:
        if (n_dirichlet != 0) {
            throw ConfigurationError("neumann regime: mesh has Dirichlet-tagged boundary faces");
        }
        break;
    case Regime::DirichletWeak:
    case Regime::DirichletStrong:
        if (n_dirichlet == 0) {
            throw ConfigurationError(std::string(to_string(regime_)) + " regime: mesh has no Dirichlet faces");
        }
        break;
    }
    if (!(params_.c11_scale >= 0) || !std::isfinite(params_.c11_scale)) {
        throw ConfigurationError("c11_scale must be finite and nonnegative");
    }

    mass_ = assemble_mass(mesh_, ref_);
    const Index n = mesh_.num_elements();
    const Index nloc = ref_.num_nodes();
    mass_inv_ = ElementBlockMatrix(n, nloc);
    parallel_for(n, [&](Index e) {
        Eigen::LLT<MatrixXd> llt(mass_.block(e));
        if (llt.info() != Eigen::Success) {
            throw FactorizationError("mass block of element " + std::to_string(e) + " is not positive definite");
        }
        mass_inv_.block(e) = llt.solve(MatrixXd::Identity(nloc, nloc));
    });

    divergence_ = assemble_divergence(mesh_, ref_, params_, regime_);
    gradient_ = assemble_gradient(mesh_, ref_, params_, regime_);
    penalty_ = assemble_penalty(mesh_, ref_, params_, regime_);
    has_penalty_ = !penalty_.is_zero();

    mask_ = VectorXd::Ones(num_dofs());
    if (regime_ == Regime::DirichletStrong) {
        boundary_ = boundary_dofs(mesh_, ref_);
        if (boundary_.empty()) {
            throw ConfigurationError("dirichlet_strong regime: empty boundary index set");
        }
        for (Index i : boundary_) {
            mask_(i) = 0;
        }
    }

    ones_mass_ = mass_ * VectorXd::Ones(num_dofs());
    total_mass_ = ones_mass_.sum();

    positions_.resize(2, num_dofs());
    areas_.resize(n);
    for (Index e = 0; e < n; ++e) {
        for (Index a = 0; a < nloc; ++a) {
            positions_.col(e * nloc + a) = mesh_.map(e, ref_.node(static_cast<int>(a)));
        }
        areas_(e) = mesh_.element_area(e);
    }
}

void DgDiscretization::apply_generator(const VectorXd& u, VectorXd& out) const
{
    if (u.size() != num_dofs()) {
        throw ArgumentError("apply_generator: vector length " + std::to_string(u.size()) + ", expected " +
                            std::to_string(num_dofs()));
    }
    VectorXd w;
    VectorXd s;
    VectorXd y;
    const bool strong = regime_ == Regime::DirichletStrong;
    if (strong) {
        divergence_.apply_transpose(mask_.cwiseProduct(u), w);
    } else {
        divergence_.apply_transpose(u, w);
    }
    mass_inv_.apply(w, s, 2);
    divergence_.apply(s, y);
    if (strong) {
        y = -mask_.cwiseProduct(y);
        mass_inv_.apply(y, s);
        out = mask_.cwiseProduct(s);
        return;
    }
    y = -y;
    if (has_penalty_) {
        penalty_.apply(u, w);
        y += w;
    }
    mass_inv_.apply(y, out);
}

VectorXd DgDiscretization::apply_generator(const VectorXd& u) const
{
    VectorXd out;
    apply_generator(u, out);
    return out;
}

void DgDiscretization::apply_laplacian(const VectorXd& u, VectorXd& out) const
{
    if (u.size() != num_dofs()) {
        throw ArgumentError("apply_laplacian: vector length " + std::to_string(u.size()) + ", expected " +
                            std::to_string(num_dofs()));
    }
    VectorXd w;
    VectorXd s;
    divergence_.apply_transpose(u, w);
    mass_inv_.apply(w, s, 2);
    divergence_.apply(s, out);
    out = -out;
    if (has_penalty_) {
        penalty_.apply(u, w);
        out += w;
    }
}

VectorXd DgDiscretization::solve_gradient(const VectorXd& u) const
{
    if (u.size() != num_dofs()) {
        throw ArgumentError("solve_gradient: vector length mismatch");
    }
    VectorXd w;
    VectorXd s;
    divergence_.apply_transpose(u, w);
    mass_inv_.apply(-w, s, 2);
    return s;
}

VectorXd DgDiscretization::mean_zero_project(const VectorXd& u) const
{
    if (u.size() != num_dofs()) {
        throw ArgumentError("mean_zero_project: vector length mismatch");
    }
    return u.array() - ones_mass_.dot(u) / total_mass_;
}

void DgDiscretization::constrain(VectorXd& u) const
{
    for (Index i : boundary_) {
        u(i) = 0;
    }
}

namespace {

MatrixXd columns_of(Index n, const auto& apply)
{
    MatrixXd out(n, n);
    VectorXd e = VectorXd::Zero(n);
    VectorXd col;
    for (Index j = 0; j < n; ++j) {
        e(j) = 1;
        apply(e, col);
        out.col(j) = col;
        e(j) = 0;
    }
    return out;
}

} // namespace

MatrixXd DgDiscretization::dense_laplacian() const
{
    return columns_of(num_dofs(), [this](const VectorXd& x, VectorXd& y) { apply_laplacian(x, y); });
}

MatrixXd DgDiscretization::dense_generator() const
{
    return columns_of(num_dofs(), [this](const VectorXd& x, VectorXd& y) { apply_generator(x, y); });
}

namespace {

// Dense inverse of the vector-valued mass matrix: one copy of M_e^{-1} per
// component, computed from the dense scalar inverse.
MatrixXd vector_mass_inverse(const MatrixXd& m_inv, Index nloc)
{
    const Index n = m_inv.rows() / nloc;
    MatrixXd out = MatrixXd::Zero(2 * m_inv.rows(), 2 * m_inv.rows());
    for (Index e = 0; e < n; ++e) {
        const MatrixXd b = m_inv.block(e * nloc, e * nloc, nloc, nloc);
        out.block(2 * e * nloc, 2 * e * nloc, nloc, nloc) = b;
        out.block((2 * e + 1) * nloc, (2 * e + 1) * nloc, nloc, nloc) = b;
    }
    return out;
}

} // namespace

MatrixXd DgDiscretization::dense_target_covariance() const
{
    const MatrixXd m_inv = dense_mass().fullPivLu().inverse();
    if (regime_ != Regime::DirichletStrong) {
        return m_inv;
    }
    return mask_.asDiagonal() * m_inv * mask_.asDiagonal();
}

MatrixXd DgDiscretization::dense_subspace_target() const
{
    MatrixXd c = dense_target_covariance();
    if (mean_zero_regime(regime_)) {
        c.array() -= 1.0 / total_mass_;
    }
    return c;
}

MatrixXd DgDiscretization::dense_deflated_generator() const
{
    MatrixXd L = dense_generator();
    if (mean_zero_regime(regime_)) {
        L -= VectorXd::Ones(num_dofs()) * ones_mass_.transpose() / total_mass_;
    } else if (regime_ == Regime::DirichletStrong) {
        for (Index i : boundary_) {
            L(i, i) -= 1;
        }
    }
    return L;
}

MatrixXd DgDiscretization::dense_noise_covariance() const
{
    const MatrixXd m_inv = dense_mass().fullPivLu().inverse();
    const MatrixXd D = dense_divergence();
    const MatrixXd B = D * vector_mass_inverse(m_inv, nodes_per_element()) * D.transpose();
    if (regime_ == Regime::DirichletStrong) {
        const MatrixXd c = mask_.asDiagonal() * m_inv * mask_.asDiagonal();
        return 2 * c * B * c;
    }
    return 2 * (m_inv * B * m_inv - m_inv * dense_penalty() * m_inv);
}

double DgDiscretization::spectral_radius_estimate(int iterations) const
{
    // L is diagonalizable with real eigenvalues, so the norm growth of the
    // power iterate converges to the largest |eigenvalue|.
    VectorXd v(num_dofs());
    for (Index i = 0; i < v.size(); ++i) {
        v(i) = std::sin(1.0 + 12.9898 * static_cast<double>(i)) + 0.1;
    }
    if (mean_zero_regime(regime_)) {
        v = mean_zero_project(v);
    }
    constrain(v);
    VectorXd w;
    double lambda = 0;
    for (int it = 0; it < iterations; ++it) {
        const double norm = v.norm();
        if (norm == 0) {
            return 0;
        }
        v /= norm;
        apply_generator(v, w);
        lambda = w.norm();
        v.swap(w);
    }
    return lambda;
}

} // namespace sdgm
