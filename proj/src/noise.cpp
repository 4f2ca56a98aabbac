#include "sdgm/noise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "sdgm/errors.hpp"
#include "sdgm/fdd.hpp"
#include "sdgm/parallel.hpp"

namespace sdgm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ElementBlockMatrix block_factor_inverse_mass(const ElementBlockMatrix& M)
{
    const Index bs = M.block_size();
    ElementBlockMatrix Q(M.num_blocks(), bs);
    parallel_for(M.num_blocks(), [&](Index e) {
        Eigen::LLT<MatrixXd> llt(M.block(e));
        if (llt.info() != Eigen::Success) {
            throw FactorizationError("mass block of element " + std::to_string(e) + " is not positive definite");
        }
        // L^{-T}: solve L^T X = I.
        Q.block(e) = llt.matrixU().solve(MatrixXd::Identity(bs, bs));
    });
    return Q;
}

NoiseSampler::NoiseSampler(Kind kind, const ElementBlockMatrix& M, const BlockSparseOperator& D)
    : kind_(kind), divergence_(D), m_inv_(M.num_blocks(), M.block_size())
{
    if (D.num_elements() != M.num_blocks() || D.rows() != M.rows() || D.cols() != 2 * M.rows()) {
        throw ArgumentError("noise sampler: D must be N x 2N for the N DOFs of M");
    }
    parallel_for(M.num_blocks(), [&](Index e) {
        Eigen::LLT<MatrixXd> llt(M.block(e));
        if (llt.info() != Eigen::Success) {
            throw FactorizationError("mass block of element " + std::to_string(e) + " is not positive definite");
        }
        m_inv_.block(e) = llt.solve(MatrixXd::Identity(M.block_size(), M.block_size()));
    });
}

void NoiseSampler::set_mean_projection(const ElementBlockMatrix& M)
{
    mean_zero_ = true;
    ones_mass_ = M * VectorXd::Ones(M.rows());
    total_mass_ = ones_mass_.sum();
}

std::string NoiseSampler::name() const
{
    return kind_ == Kind::RandomFlux ? "random_flux" : "fdd";
}

void NoiseSampler::apply(const VectorXd& xi, VectorXd& out) const
{
    if (xi.size() != noise_dim()) {
        throw ArgumentError("NoiseSampler::apply: input length " + std::to_string(xi.size()) + ", expected " +
                            std::to_string(noise_dim()));
    }
    const Index n = num_dofs();
    const Index n_el = m_inv_.num_blocks();
    const Index nloc = m_inv_.block_size();
    VectorXd eta;
    if (kind_ == Kind::Fdd) {
        q_.apply(xi.head(2 * n), eta, 2);
    } else {
        eta = xi.head(2 * n);
    }
    VectorXd y;
    divergence_.apply(eta, y);
    if (mask_.size() > 0) {
        y.array() *= mask_.array();
    }
    out.resize(n);
    parallel_for(n_el, [&](Index e) {
        auto oe = out.segment(e * nloc, nloc);
        oe.noalias() = scale_(e) * (m_inv_.block(e) * y.segment(e * nloc, nloc));
        if (weak_ && r2_[e].size() > 0) {
            oe.noalias() += r2_[e] * xi.segment(2 * n + e * nloc, nloc);
        }
    });
    if (mask_.size() > 0) {
        out.array() *= mask_.array();
    }
    if (mean_zero_) {
        out.array() -= ones_mass_.dot(out) / total_mass_;
    }
}

void NoiseSampler::draw(const GaussianStream& stream, std::uint64_t step, VectorXd& out) const
{
    const Index n = num_dofs();
    const Index nloc = m_inv_.block_size();
    VectorXd xi(noise_dim());
    parallel_for(m_inv_.num_blocks(), [&](Index e) {
        const auto id = static_cast<std::uint32_t>(e);
        stream.fill(step, id, 0, xi.segment(2 * e * nloc, 2 * nloc));
        if (weak_) {
            if (r2_[e].size() > 0) {
                stream.fill(step, id, 1, xi.segment(2 * n + e * nloc, nloc));
            } else {
                xi.segment(2 * n + e * nloc, nloc).setZero();
            }
        }
    });
    apply(xi, out);
}

MatrixXd NoiseSampler::dense_factor() const
{
    MatrixXd R(num_dofs(), noise_dim());
    VectorXd unit = VectorXd::Zero(noise_dim());
    VectorXd col;
    for (Index j = 0; j < noise_dim(); ++j) {
        unit(j) = 1;
        apply(unit, col);
        R.col(j) = col;
        unit(j) = 0;
    }
    return R;
}

MatrixXd NoiseSampler::dense_covariance() const
{
    const MatrixXd R = dense_factor();
    return R * R.transpose();
}

NoiseSampler build_sampler_neumann_periodic(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                            const ElementBlockMatrix* E)
{
    if (E != nullptr && !E->is_zero()) {
        throw ConfigurationError("periodic/neumann sampler: penalty E must be zero");
    }
    NoiseSampler s(NoiseSampler::Kind::Fdd, M, D);
    s.q_ = block_factor_inverse_mass(M);
    s.scale_ = VectorXd::Constant(M.num_blocks(), std::numbers::sqrt2);
    s.set_mean_projection(M);
    return s;
}

NoiseSampler build_sampler_dirichlet_weak(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                          const ElementBlockMatrix& E)
{
    if (E.num_blocks() != M.num_blocks() || E.block_size() != M.block_size()) {
        throw ArgumentError("weak dirichlet sampler: E and M block layouts differ");
    }
    NoiseSampler s(NoiseSampler::Kind::Fdd, M, D);
    s.q_ = block_factor_inverse_mass(M);
    s.scale_ = VectorXd::Constant(M.num_blocks(), std::numbers::sqrt2);
    s.weak_ = true;
    s.r2_.assign(M.num_blocks(), MatrixXd());
    parallel_for(M.num_blocks(), [&](Index e) {
        const MatrixXd& Ee = E.block(e);
        if ((Ee.array() == 0).all()) {
            return;
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (Ee + Ee.transpose()));
        VectorXd lambda = eig.eigenvalues();
        if (lambda.maxCoeff() > 1e-10) {
            throw FactorizationError("penalty block of element " + std::to_string(e) +
                                     " has positive eigenvalue " + std::to_string(lambda.maxCoeff()));
        }
        lambda = lambda.cwiseMin(0.0);
        s.r2_[e] = std::numbers::sqrt2 * s.m_inv_.block(e) * eig.eigenvectors() * (-lambda).cwiseSqrt().asDiagonal();
    });
    return s;
}

NoiseSampler build_sampler_dirichlet_strong(const ElementBlockMatrix& M, const BlockSparseOperator& D,
                                            const std::vector<Index>& boundary)
{
    if (boundary.empty()) {
        throw ConfigurationError("strong dirichlet sampler: empty boundary index set");
    }
    NoiseSampler s(NoiseSampler::Kind::Fdd, M, D);
    s.q_ = block_factor_inverse_mass(M);
    s.scale_ = VectorXd::Constant(M.num_blocks(), std::numbers::sqrt2);
    s.mask_ = VectorXd::Ones(M.rows());
    for (Index i : boundary) {
        s.mask_(i) = 0;
    }
    return s;
}

NoiseSampler build_sampler_random_flux(const ElementBlockMatrix& M, const BlockSparseOperator& D, int p,
                                       const VectorXd& h, bool mean_zero, const std::vector<Index>& boundary)
{
    if (h.size() != M.num_blocks() || !(h.array() > 0).all()) {
        throw ArgumentError("random flux sampler: need one positive h per element");
    }
    NoiseSampler s(NoiseSampler::Kind::RandomFlux, M, D);
    const double p1 = p + 1;
    s.scale_ = (p1 * p1) * h.cwiseInverse();
    if (mean_zero) {
        s.set_mean_projection(M);
    }
    if (!boundary.empty()) {
        s.mask_ = VectorXd::Ones(M.rows());
        for (Index i : boundary) {
            s.mask_(i) = 0;
        }
    }
    return s;
}

std::string_view to_string(SamplerKind kind)
{
    return kind == SamplerKind::Fdd ? "fdd" : "random_flux";
}

namespace {

std::string lower(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

SamplerKind parse_sampler_kind(std::string_view text)
{
    const std::string s = lower(text);
    if (s == "fdd") {
        return SamplerKind::Fdd;
    }
    if (s == "random_flux") {
        return SamplerKind::RandomFlux;
    }
    throw ArgumentError("unknown sampler '" + std::string(text) + "' (expected fdd or random_flux)");
}

std::string_view to_string(FluxScale scale)
{
    return scale == FluxScale::Element ? "element" : "global";
}

FluxScale parse_flux_scale(std::string_view text)
{
    const std::string s = lower(text);
    if (s == "element") {
        return FluxScale::Element;
    }
    if (s == "global") {
        return FluxScale::Global;
    }
    throw ArgumentError("unknown random-flux scale '" + std::string(text) + "' (expected element or global)");
}

NoiseSampler make_sampler(const DgDiscretization& disc, SamplerKind kind, FluxScale scale)
{
    if (kind == SamplerKind::RandomFlux) {
        VectorXd h = disc.element_areas().cwiseSqrt();
        if (scale == FluxScale::Global) {
            h.setConstant(std::sqrt(disc.element_areas().sum() / static_cast<double>(disc.num_elements())));
        }
        return build_sampler_random_flux(disc.mass(), disc.divergence(), disc.degree(), h,
                                         mean_zero_regime(disc.regime()), disc.boundary_indices());
    }
    switch (disc.regime()) {
    case Regime::Periodic:
    case Regime::Neumann: return build_sampler_neumann_periodic(disc.mass(), disc.divergence(), &disc.penalty());
    case Regime::DirichletWeak: return build_sampler_dirichlet_weak(disc.mass(), disc.divergence(), disc.penalty());
    case Regime::DirichletStrong:
        return build_sampler_dirichlet_strong(disc.mass(), disc.divergence(), disc.boundary_indices());
    }
    throw ConfigurationError("unsupported regime");
}

DenseNoiseSampler::DenseNoiseSampler(const MatrixXd& covariance, std::string label)
    : factor_(covariance_factor(covariance)), label_(std::move(label))
{
}

void DenseNoiseSampler::draw(const GaussianStream& stream, std::uint64_t step, VectorXd& out) const
{
    VectorXd xi(factor_.cols());
    stream.fill(step, 0, 2, xi);
    out.noalias() = factor_ * xi;
}

} // namespace sdgm
