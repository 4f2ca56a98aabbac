#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "sdgm/errors.hpp"
#include "sdgm/noise.hpp"
#include "sdgm/parallel.hpp"
#include "sdgm/statistics.hpp"
#include "support.hpp"

using namespace sdgm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Independent of the sampler code: straight from dense M, D, E.
MatrixXd dense_lambda(const DgDiscretization& d)
{
    const MatrixXd Mi = d.dense_mass().inverse();
    const MatrixXd D = d.dense_divergence();
    MatrixXd Mv = MatrixXd::Zero(2 * d.num_dofs(), 2 * d.num_dofs());
    // Vector mass: the scalar block repeated for both components of each element.
    const Index n = d.nodes_per_element();
    for (Index e = 0; e < d.num_elements(); ++e) {
        const MatrixXd& b = d.mass().block(e);
        Mv.block(2 * n * e, 2 * n * e, n, n) = b;
        Mv.block(2 * n * e + n, 2 * n * e + n, n, n) = b;
    }
    const MatrixXd Mvi = Mv.inverse();
    if (d.regime() == Regime::DirichletStrong) {
        const MatrixXd I = d.interior_mask().asDiagonal();
        const MatrixXd Ct = I * Mi * I;
        return 2 * Ct * D * Mvi * D.transpose() * Ct;
    }
    return 2 * (Mi * D * Mvi * D.transpose() * Mi - Mi * d.dense_penalty() * Mi);
}

} // namespace

TEST(BlockFactor, Examples)
{
    ElementBlockMatrix M(2, 3);
    M.block(0) = Eigen::Vector3d(4, 9, 16).asDiagonal();
    M.block(1) = Eigen::Vector3d(1, 0.25, 2).asDiagonal();
    const ElementBlockMatrix Q = block_factor_inverse_mass(M);
    EXPECT_TRUE(Q.block(0).isApprox(MatrixXd(Eigen::Vector3d(0.5, 1.0 / 3, 0.25).asDiagonal())));
    EXPECT_TRUE(Q.block(1).isApprox(MatrixXd(Eigen::Vector3d(1, 2, 1 / std::sqrt(2.0)).asDiagonal())));

    const DgDiscretization d(annulus_mesh(1, 8, 0.5, 1.0, 0.1, 3), 3, Regime::Neumann);
    const ElementBlockMatrix Qd = block_factor_inverse_mass(d.mass());
    for (Index e = 0; e < d.num_elements(); ++e) {
        const MatrixXd I = Qd.block(e) * Qd.block(e).transpose() * d.mass().block(e);
        EXPECT_LE((I - MatrixXd::Identity(I.rows(), I.cols())).norm(), 1e-12);
    }
    M.block(1)(2, 2) = -1;
    try {
        (void)block_factor_inverse_mass(M);
        FAIL();
    } catch (const FactorizationError& e) {
        EXPECT_NE(std::string(e.what()).find("element 1"), std::string::npos);
    }
}

TEST(Sampler, ExactFactorizationAllRegimes)
{
    struct Case {
        QuadMesh mesh;
        Regime regime;
    };
    const std::vector<Case> cases = {
        {test::periodic_square(2), Regime::Periodic},
        {test::shipped_periodic_mesh(), Regime::Periodic},
        {apply_periodic(cartesian_mesh(3, 3), true, false), Regime::Neumann},
        {annulus_mesh(1, 8, 0.5, 1.0, 0.1, 2), Regime::Neumann},
        {test::dirichlet_unit_square(2), Regime::DirichletWeak},
        {test::dirichlet_unit_square(3), Regime::DirichletStrong},
        {test::dirichlet_unit_square(4), Regime::DirichletStrong},
    };
    for (const Case& c : cases) {
        for (int p : {1, 2}) {
            const DgDiscretization d(c.mesh, p, c.regime);
            const NoiseSampler s = make_sampler(d, SamplerKind::Fdd);
            const MatrixXd lambda = dense_lambda(d);
            EXPECT_LE(test::rel(s.dense_covariance(), lambda), 1e-10) << to_string(c.regime) << " p=" << p;
            EXPECT_LE(test::rel(d.dense_noise_covariance(), lambda), 1e-10) << to_string(c.regime) << " p=" << p;
        }
    }
}

TEST(Sampler, WeakWithZeroPenaltyIsNeumann)
{
    const DgDiscretization d(apply_periodic(cartesian_mesh(2, 2), true, false), 1, Regime::Neumann);
    const ElementBlockMatrix E(d.num_elements(), d.nodes_per_element());
    const NoiseSampler weak = build_sampler_dirichlet_weak(d.mass(), d.divergence(), E);
    const NoiseSampler neu = build_sampler_neumann_periodic(d.mass(), d.divergence());
    // Mean projection aside, the factors agree on the xi1 columns and R2 = 0.
    const MatrixXd Rw = weak.dense_factor();
    const MatrixXd Rn = neu.dense_factor();
    const MatrixXd P = d.dense_mass();
    const VectorXd one = VectorXd::Ones(d.num_dofs());
    const MatrixXd proj = MatrixXd::Identity(d.num_dofs(), d.num_dofs()) - one * (P * one).transpose() / one.dot(P * one);
    EXPECT_LE((proj * Rw.leftCols(Rn.cols()) - Rn).norm(), 1e-12 * Rn.norm());
    EXPECT_EQ(Rw.rightCols(d.num_dofs()).cwiseAbs().maxCoeff(), 0);
}

TEST(Sampler, PenaltyChecks)
{
    const DgDiscretization d(test::dirichlet_unit_square(2), 1, Regime::DirichletWeak);
    EXPECT_THROW((void)build_sampler_neumann_periodic(d.mass(), d.divergence(), &d.penalty()), ConfigurationError);
    for (Index e = 0; e < d.num_elements(); ++e) {
        const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(-d.penalty().block(e)).eigenvalues();
        EXPECT_GE(ev.minCoeff(), -1e-10);
    }
    ElementBlockMatrix bad = d.penalty();
    bad.block(0) *= -1;
    EXPECT_THROW((void)build_sampler_dirichlet_weak(d.mass(), d.divergence(), bad), FactorizationError);
    EXPECT_THROW((void)build_sampler_dirichlet_strong(d.mass(), d.divergence(), {}), ConfigurationError);
}

TEST(Sampler, StrongBoundaryEntriesExactlyZero)
{
    const DgDiscretization d(test::dirichlet_unit_square(3), 2, Regime::DirichletStrong);
    const NoiseSampler s = make_sampler(d, SamplerKind::Fdd);
    const NoiseSampler rf = make_sampler(d, SamplerKind::RandomFlux);
    const GaussianStream stream(5);
    VectorXd f;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        for (const NoiseSampler* smp : {&s, &rf}) {
            smp->draw(stream, k, f);
            for (Index b : d.boundary_indices()) {
                ASSERT_EQ(f(b), 0.0) << "step " << k;
            }
        }
    }
    const MatrixXd lambda = s.dense_covariance();
    const MatrixXd I = d.interior_mask().asDiagonal();
    EXPECT_EQ((lambda - I * lambda * I).cwiseAbs().maxCoeff(), 0);
}

TEST(Sampler, PeriodicDrawsAreMeanZero)
{
    const DgDiscretization d(test::shipped_periodic_mesh(), 2, Regime::Periodic);
    const NoiseSampler s = make_sampler(d, SamplerKind::Fdd);
    EXPECT_TRUE(s.projects_mean());
    // Analytically: 1^T M M^{-1} D = (D^T 1)^T = 0.
    const VectorXd Dt1 = d.dense_divergence().transpose() * VectorXd::Ones(d.num_dofs());
    EXPECT_LE(Dt1.cwiseAbs().maxCoeff(), 1e-12);
    const GaussianStream stream(17);
    VectorXd f;
    const VectorXd m1 = d.mass() * VectorXd::Ones(d.num_dofs());
    for (std::uint64_t k = 0; k < 200; ++k) {
        s.draw(stream, k, f);
        EXPECT_LE(std::abs(m1.dot(f)), 1e-10 * f.norm());
    }
}

TEST(Sampler, ZeroMeanOverManyDraws)
{
    const DgDiscretization d(test::periodic_square(2), 1, Regime::Periodic);
    for (SamplerKind kind : {SamplerKind::Fdd, SamplerKind::RandomFlux}) {
        const NoiseSampler s = make_sampler(d, kind);
        const VectorXd sd = s.dense_covariance().diagonal().cwiseSqrt();
        const GaussianStream stream(3);
        VectorXd f;
        VectorXd sum = VectorXd::Zero(d.num_dofs());
        const int n = 100000;
        for (int k = 0; k < n; ++k) {
            s.draw(stream, k, f);
            sum += f;
        }
        EXPECT_TRUE(((sum / n).cwiseAbs().array() <= 4 * sd.array() / std::sqrt(double(n))).all())
            << to_string(kind);
    }
}

TEST(Sampler, MonteCarloMatchesDenseLambda)
{
    const DgDiscretization d(test::periodic_square(2), 1, Regime::Periodic);
    const NoiseSampler s = make_sampler(d, SamplerKind::Fdd);
    const MatrixXd lambda = s.dense_covariance();
    CovarianceAccumulator acc(d.num_dofs());
    const GaussianStream stream(11);
    VectorXd f;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
        s.draw(stream, k, f);
        acc.add(f);
    }
    const MatrixXd se = gaussian_standard_errors(lambda, n);
    const MatrixXd z = (acc.covariance() - lambda).cwiseQuotient(se);
    EXPECT_LE(z.cwiseAbs().maxCoeff(), 5.0);
}

TEST(Sampler, MarginalsAreGaussian)
{
    const DgDiscretization d(test::dirichlet_unit_square(2), 1, Regime::DirichletWeak);
    const NoiseSampler s = make_sampler(d, SamplerKind::Fdd);
    const GaussianStream stream(8);
    VectorXd f;
    const Index i = 5;
    const double var = s.dense_covariance()(i, i);
    double m3 = 0, m4 = 0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
        s.draw(stream, k, f);
        const double z = f(i) / std::sqrt(var);
        m3 += z * z * z;
        m4 += z * z * z * z;
    }
    EXPECT_LE(std::abs(m3 / n), 5 * std::sqrt(15.0 / n));
    EXPECT_LE(std::abs(m4 / n - 3), 5 * std::sqrt(96.0 / n));
}

TEST(Sampler, DeterministicAcrossThreadCounts)
{
    // 8 x 8 = 64 elements reaches the parallel threshold.
    const DgDiscretization d(test::periodic_square(8), 2, Regime::Periodic);
    ASSERT_GE(d.num_elements(), kParallelMinElements);
    const NoiseSampler s = make_sampler(d, SamplerKind::Fdd);
    const GaussianStream stream(99);
    VectorXd one_thread;
    VectorXd many;
    VectorXd again;
    set_num_threads(1);
    s.draw(stream, 77, one_thread);
    set_num_threads(8);
    s.draw(stream, 77, many);
    s.draw(stream, 77, again);
    set_num_threads(0);
    EXPECT_EQ(one_thread, many);
    EXPECT_EQ(many, again);
}

TEST(RandomFlux, ScaleFactor)
{
    const DgDiscretization d(cartesian_mesh(2, 2, {0, 0, 2, 2}), 1, Regime::Neumann);
    const NoiseSampler rf = make_sampler(d, SamplerKind::RandomFlux);
    // h = 1 for every element: F = 4 M^{-1} D xi.
    const MatrixXd expected = 4 * d.dense_mass().inverse() * d.dense_divergence();
    EXPECT_LE(test::rel(rf.dense_factor(), expected), 1e-12);
    EXPECT_EQ(rf.noise_dim(), 2 * d.num_dofs());
    VectorXd h = VectorXd::Ones(d.num_elements());
    h(0) = 0;
    EXPECT_THROW((void)build_sampler_random_flux(d.mass(), d.divergence(), 1, h), ArgumentError);
}

TEST(RandomFlux, AgreesWithFddForModalIdentityMass)
{
    // With an orthonormal basis M = I, so Lambda = 2 D D^T and the random
    // flux covariance is s^2 D D^T: equal up to s^2 / 2.
    const DgDiscretization d(test::periodic_square(3), 1, Regime::Periodic);
    const Index n = d.nodes_per_element();
    ElementBlockMatrix I(d.num_elements(), n);
    for (Index e = 0; e < d.num_elements(); ++e) {
        I.block(e) = MatrixXd::Identity(n, n);
    }
    const double h = 2.0 / 3.0;
    const double s = 4 / h;
    const NoiseSampler fdd = build_sampler_neumann_periodic(I, d.divergence());
    const NoiseSampler rf = build_sampler_random_flux(I, d.divergence(), 1, VectorXd::Constant(d.num_elements(), h));
    EXPECT_LE(test::rel(rf.dense_covariance() * (2 / (s * s)), fdd.dense_covariance()), 1e-12);
}

TEST(DenseNoise, ReproducesCovariance)
{
    std::mt19937_64 rng(21);
    const MatrixXd G = test::random_spd(rng, 6);
    const DenseNoiseSampler s(G, "g");
    EXPECT_LE(test::rel(s.factor() * s.factor().transpose(), G), 1e-12);
    EXPECT_EQ(s.name(), "g");
    EXPECT_EQ(s.num_dofs(), 6);
}

TEST(SamplerKind, Parse)
{
    EXPECT_EQ(parse_sampler_kind("random_flux"), SamplerKind::RandomFlux);
    EXPECT_EQ(parse_sampler_kind("fdd"), SamplerKind::Fdd);
    EXPECT_THROW((void)parse_sampler_kind("white"), ArgumentError);
    EXPECT_EQ(parse_flux_scale("global"), FluxScale::Global);
}
