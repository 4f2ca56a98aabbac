#include <gtest/gtest.h>

#include <random>

#include "sdgm/errors.hpp"
#include "sdgm/statistics.hpp"
#include "support.hpp"

using namespace sdgm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Accumulator, Examples)
{
    const VectorXd u = Eigen::Vector3d(1, -2, 0.5);
    CovarianceAccumulator one(3);
    one.add(u);
    EXPECT_EQ(one.covariance(), u * u.transpose());
    CovarianceAccumulator pm(3);
    pm.add(u);
    pm.add(-u);
    EXPECT_EQ(pm.covariance(), u * u.transpose());
    EXPECT_EQ(pm.mean(), VectorXd::Zero(3));
    EXPECT_EQ(pm.count(), 2);
    EXPECT_THROW(pm.add(VectorXd::Ones(2)), ArgumentError);
    CovarianceAccumulator empty(3);
    EXPECT_THROW((void)empty.covariance(), ArgumentError);
    EXPECT_THROW((void)CovarianceAccumulator(3, true, {3}), ArgumentError);
}

TEST(Accumulator, SparseModeMatchesDense)
{
    std::mt19937_64 rng(1);
    const MatrixXd samples = test::random_matrix(rng, 6, 300);
    CovarianceAccumulator dense(6);
    CovarianceAccumulator sparse(6, false, {1, 4});
    for (Index k = 0; k < samples.cols(); ++k) {
        dense.add(samples.col(k));
        sparse.add(samples.col(k));
    }
    const MatrixXd C = dense.covariance();
    EXPECT_LE((sparse.second_moment_diagonal() - C.diagonal()).cwiseAbs().maxCoeff(), 1e-14);
    const MatrixXd rows = sparse.tracked_row_moments();
    EXPECT_LE((rows.row(0) - C.row(1)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((rows.row(1) - C.row(4)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW((void)sparse.covariance(), ArgumentError);
    EXPECT_LE((C - samples * samples.transpose() / 300.0).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Accumulator, MergeEqualsConcatenation)
{
    std::mt19937_64 rng(2);
    const MatrixXd samples = test::random_matrix(rng, 5, 1000);
    CovarianceAccumulator all(5, true, {2});
    CovarianceAccumulator a(5, true, {2});
    CovarianceAccumulator b(5, true, {2});
    CovarianceAccumulator c(5, true, {2});
    for (Index k = 0; k < samples.cols(); ++k) {
        all.add(samples.col(k));
        (k < 137 ? a : k < 700 ? b : c).add(samples.col(k));
    }
    CovarianceAccumulator ab_c = a;
    ab_c.merge(b);
    ab_c.merge(c);
    CovarianceAccumulator c_ba = c;
    c_ba.merge(b);
    c_ba.merge(a);
    EXPECT_EQ(ab_c.count(), 1000);
    EXPECT_LE(test::rel(ab_c.covariance(), all.covariance()), 1e-12);
    EXPECT_LE(test::rel(c_ba.covariance(), all.covariance()), 1e-12);
    EXPECT_LE((ab_c.mean() - all.mean()).norm(), 1e-12);
    EXPECT_LE(test::rel(ab_c.tracked_row_moments(), all.tracked_row_moments()), 1e-12);
    EXPECT_THROW(a.merge(CovarianceAccumulator(4)), ArgumentError);
}

TEST(Accumulator, IidStandardNormal)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const Index dim = 4;
    CovarianceAccumulator acc(dim);
    VectorXd u(dim);
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
        for (Index i = 0; i < dim; ++i) {
            u(i) = g(rng);
        }
        acc.add(u);
    }
    const MatrixXd I = MatrixXd::Identity(dim, dim);
    const MatrixXd z = (acc.covariance() - I).cwiseQuotient(gaussian_standard_errors(I, n));
    EXPECT_LE(z.cwiseAbs().maxCoeff(), 5.0);
}

TEST(Accumulator, LongRunsStayAccurate)
{
    // Constant samples: the estimate must stay exactly the outer product.
    CovarianceAccumulator acc(2);
    const VectorXd u = Eigen::Vector2d(0.1, 0.3);
    for (int k = 0; k < 2000000; ++k) {
        acc.add(u);
    }
    EXPECT_LE(test::rel(acc.covariance(), u * u.transpose()), 1e-14);
}

TEST(Metrics, RelativeFrobenius)
{
    const MatrixXd C = MatrixXd::Random(4, 4);
    EXPECT_EQ(relative_frobenius_error(C, C), 0);
    EXPECT_NEAR(relative_frobenius_error(2 * C, C), 1, 1e-15);
    EXPECT_THROW((void)relative_frobenius_error(C, MatrixXd::Zero(4, 4)), ArgumentError);
    EXPECT_THROW((void)relative_frobenius_error(C, MatrixXd::Ones(3, 4)), ArgumentError);
}

TEST(Metrics, MassIdentityAndRows)
{
    const DgDiscretization d(test::shipped_periodic_mesh(), 1, Regime::Periodic);
    const MatrixXd M = d.dense_mass();
    const MatrixXd Mi = M.inverse();
    const auto [prod, dev] = mass_identity_deviation(M, Mi);
    EXPECT_LE(dev, 1e-12);
    EXPECT_NEAR(mass_identity_deviation(M, MatrixXd::Zero(M.rows(), M.cols())).second, 1.0, 1e-15);
    const auto blocked = mass_identity_deviation(d.mass(), Mi);
    EXPECT_LE((blocked.first - prod).cwiseAbs().maxCoeff(), 1e-12);

    const Index i = 50;
    const VectorXd row = row_correlation(Mi, d.mass(), i);
    EXPECT_NEAR(row(i), 1, 1e-12);
    EXPECT_LE(off_index_mass(row, i), 1e-10);
    std::mt19937_64 rng(4);
    const MatrixXd S = test::random_spd(rng, M.rows());
    EXPECT_LE((row_correlation(S, M, 7) - (M * S).transpose().col(7)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((row_correlation(S, d.mass(), 7) - row_correlation(S, M, 7)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW((void)row_correlation(S, M, M.rows()), ArgumentError);
    EXPECT_NEAR(off_index_mass(Eigen::Vector3d(1, -2, 3), 1), 4, 0);
}

TEST(Metrics, LogLogSlope)
{
    EXPECT_NEAR(log_log_slope({1e4, 1e5, 1e6}, {1.0, std::sqrt(0.1), 0.1}), -0.5, 1e-12);
    EXPECT_NEAR(log_log_slope({16, 64, 256}, {2, 8, 32}), 1.0, 1e-12);
    EXPECT_THROW((void)log_log_slope({1}, {1}), ArgumentError);
    EXPECT_THROW((void)log_log_slope({1, 2}, {1, -1}), ArgumentError);
}
