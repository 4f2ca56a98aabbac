#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

#include "sdgm/mesh.hpp"
#include "sdgm/reference_element.hpp"

namespace sdgm {

enum class Regime { Periodic, Neumann, DirichletWeak, DirichletStrong };

[[nodiscard]] std::string_view to_string(Regime regime);
[[nodiscard]] Regime parse_regime(std::string_view text);
/// Periodic and Neumann problems live on the mean-zero subspace.
[[nodiscard]] constexpr bool mean_zero_regime(Regime r) noexcept
{
    return r == Regime::Periodic || r == Regime::Neumann;
}

struct LdgParameters {
    /// C11 = c11_scale (p + 1)^2 / h_face on Dirichlet faces; C11 = 0 on every other face.
    double c11_scale = 1.0;
};

/// Block-diagonal matrix with one dense square block per element.
class ElementBlockMatrix {
public:
    ElementBlockMatrix() = default;
    ElementBlockMatrix(Index n_elements, Index block_size);

    [[nodiscard]] Index num_blocks() const noexcept { return static_cast<Index>(blocks_.size()); }
    [[nodiscard]] Index block_size() const noexcept { return block_size_; }
    [[nodiscard]] Index rows() const noexcept { return num_blocks() * block_size_; }

    [[nodiscard]] Eigen::MatrixXd& block(Index e) { return blocks_.at(e); }
    [[nodiscard]] const Eigen::MatrixXd& block(Index e) const { return blocks_.at(e); }

    /// y = B x. x may hold `components` interleaved per element
    /// (element-major, component blocks of block_size inside each element).
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, int components = 1) const;
    [[nodiscard]] Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] Eigen::MatrixXd dense() const;

private:
    Index block_size_ = 0;
    std::vector<Eigen::MatrixXd> blocks_;
};

/// Sparse operator with an element-diagonal part plus face couplings between
/// element pairs. Rows are grouped `row_block` per element, columns `col_block`
/// per element. Both products gather per element, so they parallelize
/// without write conflicts.
class BlockSparseOperator {
public:
    struct Coupling {
        Index row_element;
        Index col_element;
        Eigen::MatrixXd block;
    };

    BlockSparseOperator() = default;
    BlockSparseOperator(Index n_elements, Index row_block, Index col_block);

    [[nodiscard]] Index rows() const noexcept { return n_elements_ * row_block_; }
    [[nodiscard]] Index cols() const noexcept { return n_elements_ * col_block_; }
    [[nodiscard]] Index num_elements() const noexcept { return n_elements_; }

    [[nodiscard]] Eigen::MatrixXd& diagonal(Index e) { return diagonal_.at(e); }
    [[nodiscard]] const Eigen::MatrixXd& diagonal(Index e) const { return diagonal_.at(e); }
    [[nodiscard]] const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
    void add_coupling(Index row_element, Index col_element, Eigen::MatrixXd block);
    /// Builds the gather lists; call after the last add_coupling().
    void finalize();

    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    void apply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
    [[nodiscard]] Eigen::MatrixXd dense() const;

private:
    Index n_elements_ = 0;
    Index row_block_ = 0;
    Index col_block_ = 0;
    std::vector<Eigen::MatrixXd> diagonal_;
    std::vector<Coupling> couplings_;
    std::vector<std::vector<Index>> by_row_;
    std::vector<std::vector<Index>> by_col_;
};

/// M_ij = int phi_i phi_j, one block per element.
ElementBlockMatrix assemble_mass(const QuadMesh& mesh, const ReferenceElement& ref);

/// Discrete divergence D (N x 2N) of the minimal-dissipation LDG scheme:
/// (D sigma, v) = -int sigma . grad v + sum_faces int sigma-hat . [[v]],
/// with sigma-hat taken from the plus side on interior faces, from the
/// element on Dirichlet faces, and zero (homogeneous data) on Neumann faces.
/// Vector unknowns are element-major: [sigma_x(e), sigma_y(e)] per element.
BlockSparseOperator assemble_divergence(const QuadMesh& mesh, const ReferenceElement& ref,
                                        const LdgParameters& params, Regime regime);

/// Discrete gradient G (2N x N) assembled from its own weak form,
/// (G u, tau) = -int u div tau + sum_faces int u-hat [[tau]], with u-hat from
/// the minus side, u-hat = u on Neumann faces and u-hat = 0 on Dirichlet
/// faces. Integration by parts makes G = -D^T.
BlockSparseOperator assemble_gradient(const QuadMesh& mesh, const ReferenceElement& ref,
                                      const LdgParameters& params, Regime regime);

/// E_ij = -int_{Dirichlet faces} C11 phi_i phi_j. Zero unless regime is DirichletWeak.
ElementBlockMatrix assemble_penalty(const QuadMesh& mesh, const ReferenceElement& ref,
                                    const LdgParameters& params, Regime regime);

/// Quadrature data on one non-periodic boundary face.
struct BoundaryFaceQuadrature {
    Index element = -1;
    int edge = -1;
    BoundaryTag tag = BoundaryTag::Neumann;
    Eigen::MatrixXd basis;     // quadrature points x nodes
    Eigen::Matrix2Xd points;   // physical points
    Eigen::Matrix2Xd normals;  // unit outward normals
    Eigen::VectorXd ds;        // weights times line element
    double length = 0;
};

/// Quadrature on every non-periodic boundary face, with the same rule the
/// operators are assembled with.
std::vector<BoundaryFaceQuadrature> boundary_quadrature(const QuadMesh& mesh, const ReferenceElement& ref);

/// DOFs whose nodal point lies on a Dirichlet part of the boundary.
std::vector<Index> boundary_dofs(const QuadMesh& mesh, const ReferenceElement& ref);

/// DG discretization of the diffusion operator on a mesh for one
/// boundary-condition regime.
///
/// A = -D M^{-1} D^T + E and L = M^{-1} A. With strongly imposed Dirichlet
/// data the generator becomes L~ = -C~ D M^{-1} D^T I~ with I~ the interior
/// mask and C~ = I~ M^{-1} I~, so that L~ C~ is symmetric and C~ is the
/// stationary covariance of the matching noise.
class DgDiscretization {
public:
    DgDiscretization(QuadMesh mesh, int p, Regime regime, LdgParameters params = {});

    [[nodiscard]] const QuadMesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] const ReferenceElement& reference() const noexcept { return ref_; }
    [[nodiscard]] Regime regime() const noexcept { return regime_; }
    [[nodiscard]] const LdgParameters& parameters() const noexcept { return params_; }
    [[nodiscard]] int degree() const noexcept { return ref_.degree(); }
    [[nodiscard]] Index nodes_per_element() const noexcept { return ref_.num_nodes(); }
    [[nodiscard]] Index num_elements() const noexcept { return mesh_.num_elements(); }
    [[nodiscard]] Index num_dofs() const noexcept { return num_elements() * nodes_per_element(); }

    [[nodiscard]] const ElementBlockMatrix& mass() const noexcept { return mass_; }
    [[nodiscard]] const ElementBlockMatrix& mass_inverse() const noexcept { return mass_inv_; }
    [[nodiscard]] const ElementBlockMatrix& penalty() const noexcept { return penalty_; }
    [[nodiscard]] const BlockSparseOperator& divergence() const noexcept { return divergence_; }
    [[nodiscard]] const BlockSparseOperator& gradient() const noexcept { return gradient_; }
    [[nodiscard]] const std::vector<Index>& boundary_indices() const noexcept { return boundary_; }
    /// Diagonal of I~: 0 on boundary DOFs under strong Dirichlet, 1 elsewhere.
    [[nodiscard]] const Eigen::VectorXd& interior_mask() const noexcept { return mask_; }
    /// Physical coordinates of every nodal DOF (2 x N).
    [[nodiscard]] const Eigen::Matrix2Xd& node_positions() const noexcept { return positions_; }
    [[nodiscard]] const Eigen::VectorXd& element_areas() const noexcept { return areas_; }

    /// out = L u.
    void apply_generator(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;
    [[nodiscard]] Eigen::VectorXd apply_generator(const Eigen::VectorXd& u) const;
    /// out = A u = (-D M^{-1} D^T + E) u.
    void apply_laplacian(const Eigen::VectorXd& u, Eigen::VectorXd& out) const;
    /// Elementwise LDG gradient solve sigma = M^{-1} G u, with G = -D^T.
    [[nodiscard]] Eigen::VectorXd solve_gradient(const Eigen::VectorXd& u) const;
    /// u - (1^T M u / 1^T M 1) 1.
    [[nodiscard]] Eigen::VectorXd mean_zero_project(const Eigen::VectorXd& u) const;
    /// Zeroes strongly constrained DOFs; a no-op in other regimes.
    void constrain(Eigen::VectorXd& u) const;

    [[nodiscard]] Eigen::MatrixXd dense_mass() const { return mass_.dense(); }
    [[nodiscard]] Eigen::MatrixXd dense_divergence() const { return divergence_.dense(); }
    [[nodiscard]] Eigen::MatrixXd dense_gradient() const { return gradient_.dense(); }
    [[nodiscard]] Eigen::MatrixXd dense_penalty() const { return penalty_.dense(); }
    /// A assembled column by column through apply_laplacian.
    [[nodiscard]] Eigen::MatrixXd dense_laplacian() const;
    /// L (or L~) assembled column by column through apply_generator.
    [[nodiscard]] Eigen::MatrixXd dense_generator() const;
    /// M^{-1}, or C~ under strong Dirichlet, from a dense LU of M.
    [[nodiscard]] Eigen::MatrixXd dense_target_covariance() const;
    /// The covariance the chain actually samples: M^{-1} - 1 1^T / (1^T M 1)
    /// on the mean-zero subspace of periodic/Neumann problems, otherwise
    /// dense_target_covariance().
    [[nodiscard]] Eigen::MatrixXd dense_subspace_target() const;
    /// L with its known null space shifted to eigenvalue -1 (constants for
    /// periodic/Neumann, boundary coordinates for strong Dirichlet). Agrees
    /// with L on the sampled subspace and is invertible.
    [[nodiscard]] Eigen::MatrixXd dense_deflated_generator() const;
    /// Noise covariance prescribed by fluctuation-dissipation balance, built
    /// from dense M, D, E: 2 (M^-1 D M^-1 D^T M^-1 - M^-1 E M^-1), or
    /// 2 C~ D M^-1 D^T C~ under strong Dirichlet.
    [[nodiscard]] Eigen::MatrixXd dense_noise_covariance() const;

    /// Power-iteration estimate of the largest |eigenvalue| of L.
    [[nodiscard]] double spectral_radius_estimate(int iterations = 200) const;

private:
    QuadMesh mesh_;
    ReferenceElement ref_;
    Regime regime_;
    LdgParameters params_;
    ElementBlockMatrix mass_;
    ElementBlockMatrix mass_inv_;
    ElementBlockMatrix penalty_;
    BlockSparseOperator divergence_;
    BlockSparseOperator gradient_;
    std::vector<Index> boundary_;
    Eigen::VectorXd mask_;
    Eigen::VectorXd ones_mass_;
    double total_mass_ = 0;
    bool has_penalty_ = false;
    Eigen::Matrix2Xd positions_;
    Eigen::VectorXd areas_;
};

} // namespace sdgm
