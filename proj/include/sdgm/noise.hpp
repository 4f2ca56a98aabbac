#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "sdgm/operators.hpp"
#include "sdgm/random.hpp"

namespace sdgm {

/// Q_e = L_e^{-T} for the Cholesky factor M_e = L_e L_e^T, so Q Q^T = M^{-1}
/// blockwise.
[[nodiscard]] ElementBlockMatrix block_factor_inverse_mass(const ElementBlockMatrix& M);

/// Source of one stochastic forcing realization per time step.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    [[nodiscard]] virtual Index num_dofs() const = 0;
    [[nodiscard]] virtual std::string name() const = 0;
    /// Realization for `step`; a pure function of (stream seed, step).
    virtual void draw(const GaussianStream& stream, std::uint64_t step, Eigen::VectorXd& out) const = 0;
};

/// Element-blocked noise f = R xi with R built from M, D and (weak
/// Dirichlet) E:
///
///   periodic / Neumann   R  = sqrt(2) M^{-1} D Q
///   weak Dirichlet       R1 = sqrt(2) M^{-1} D Q,  R2 = sqrt(2) M^{-1} V sqrt(-Lambda_E)
///   strong Dirichlet     R~ = sqrt(2) I~ M^{-1} I~ D Q
///   random flux          F  = ((p+1)^2 / h_e) M^{-1} D xi
///
/// xi has one entry per vector DOF (length 2N); the weak Dirichlet sampler
/// draws a second independent xi2 of length N on elements with a boundary
/// edge. Each draw costs one pass over the elements plus one D application.
class NoiseSampler final : public NoiseSource {
public:
    enum class Kind { Fdd, RandomFlux };

    [[nodiscard]] Index num_dofs() const override { return m_inv_.rows(); }
    [[nodiscard]] std::string name() const override;
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool projects_mean() const noexcept { return mean_zero_; }
    /// Length of the standard normal input: 2N, plus N for weak Dirichlet.
    [[nodiscard]] Index noise_dim() const noexcept { return 2 * num_dofs() + (weak_ ? num_dofs() : 0); }

    /// out = R xi for xi of length noise_dim().
    void apply(const Eigen::VectorXd& xi, Eigen::VectorXd& out) const;
    void draw(const GaussianStream& stream, std::uint64_t step, Eigen::VectorXd& out) const override;

    /// R as a dense N x noise_dim() matrix, column by column through apply().
    [[nodiscard]] Eigen::MatrixXd dense_factor() const;
    /// R R^T.
    [[nodiscard]] Eigen::MatrixXd dense_covariance() const;

    friend NoiseSampler build_sampler_neumann_periodic(const ElementBlockMatrix&, const BlockSparseOperator&,
                                                       const ElementBlockMatrix*);
    friend NoiseSampler build_sampler_dirichlet_weak(const ElementBlockMatrix&, const BlockSparseOperator&,
                                                     const ElementBlockMatrix&);
    friend NoiseSampler build_sampler_dirichlet_strong(const ElementBlockMatrix&, const BlockSparseOperator&,
                                                       const std::vector<Index>&);
    friend NoiseSampler build_sampler_random_flux(const ElementBlockMatrix&, const BlockSparseOperator&, int,
                                                  const Eigen::VectorXd&, bool, const std::vector<Index>&);

private:
    NoiseSampler(Kind kind, const ElementBlockMatrix& M, const BlockSparseOperator& D);
    void set_mean_projection(const ElementBlockMatrix& M);

    Kind kind_;
    std::string label_;
    BlockSparseOperator divergence_;
    ElementBlockMatrix m_inv_;
    ElementBlockMatrix q_;             // empty for random flux
    Eigen::VectorXd scale_;            // per element
    bool weak_ = false;
    std::vector<Eigen::MatrixXd> r2_;  // per element, empty when E_e = 0
    Eigen::VectorXd mask_;             // empty unless strong Dirichlet
    bool mean_zero_ = false;
    Eigen::VectorXd ones_mass_;
    double total_mass_ = 0;
};

/// Periodic and Neumann regimes. Output is projected to the mean-zero
/// subspace; passing a nonzero E throws ConfigurationError.
[[nodiscard]] NoiseSampler build_sampler_neumann_periodic(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                                          const ElementBlockMatrix* E = nullptr);

/// Weak Dirichlet. E blocks are eigendecomposed per element; eigenvalues in
/// (0, 1e-10] are clipped to zero and larger ones throw FactorizationError.
[[nodiscard]] NoiseSampler build_sampler_dirichlet_weak(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                                        const ElementBlockMatrix& E);

/// Strong Dirichlet; every draw is exactly zero at the boundary indices.
[[nodiscard]] NoiseSampler build_sampler_dirichlet_strong(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                                          const std::vector<Index>& boundary);

/// Random-flux baseline with per-element resolution h (length n_elements).
/// `mean_zero` projects the output like the periodic/Neumann sampler; a
/// nonempty `boundary` set is zeroed in every draw.
[[nodiscard]] NoiseSampler build_sampler_random_flux(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                                     int p, const Eigen::VectorXd& h, bool mean_zero = false,
                                                     const std::vector<Index>& boundary = {});

enum class SamplerKind { Fdd, RandomFlux };
enum class FluxScale { Element, Global };

[[nodiscard]] std::string_view to_string(SamplerKind kind);
[[nodiscard]] SamplerKind parse_sampler_kind(std::string_view text);
[[nodiscard]] std::string_view to_string(FluxScale scale);
[[nodiscard]] FluxScale parse_flux_scale(std::string_view text);

/// The sampler matching the discretization's regime. Random-flux h is
/// sqrt(element area) per element, or sqrt(total area / n_elements) for
/// FluxScale::Global.
[[nodiscard]] NoiseSampler make_sampler(const DgDiscretization& disc, SamplerKind kind,
                                        FluxScale scale = FluxScale::Element);

/// Noise with an arbitrary dense covariance G = F F^T; used for the
/// time-step corrected prescription on small problems.
class DenseNoiseSampler final : public NoiseSource {
public:
    /// Factors G with the symmetric eigensolver (see covariance_factor).
    explicit DenseNoiseSampler(const Eigen::MatrixXd& covariance, std::string label = "dense");

    [[nodiscard]] Index num_dofs() const override { return factor_.rows(); }
    [[nodiscard]] std::string name() const override { return label_; }
    [[nodiscard]] const Eigen::MatrixXd& factor() const noexcept { return factor_; }
    void draw(const GaussianStream& stream, std::uint64_t step, Eigen::VectorXd& out) const override;

private:
    Eigen::MatrixXd factor_;
    std::string label_;
};

} // namespace sdgm
