#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "sdgm/operators.hpp"

namespace sdgm {

/// Streaming estimator of the second moment (1/N) sum_k u_k u_k^T.
///
/// Samples are buffered and folded in with a rank-64 update; the running
/// sums use compensated (Kahan) addition so that long runs and merges lose
/// no more than a few ulps. In dense mode the full matrix is kept;
/// otherwise only the diagonal and the requested rows.
class CovarianceAccumulator {
public:
    static constexpr Index kBatch = 64;

    explicit CovarianceAccumulator(Index dim, bool dense = true, std::vector<Index> rows = {});

    void add(const Eigen::VectorXd& u);
    /// Adds another accumulator's samples; equivalent to having added them here.
    void merge(const CovarianceAccumulator& other);

    [[nodiscard]] Index dim() const noexcept { return dim_; }
    [[nodiscard]] std::int64_t count() const noexcept { return count_; }
    [[nodiscard]] bool dense() const noexcept { return dense_; }
    [[nodiscard]] const std::vector<Index>& tracked_rows() const noexcept { return rows_; }

    /// (1/N) sum u u^T. Requires dense mode.
    [[nodiscard]] Eigen::MatrixXd covariance() const;
    /// (1/N) sum u.
    [[nodiscard]] Eigen::VectorXd mean() const;
    /// (1/N) sum u_i^2.
    [[nodiscard]] Eigen::VectorXd second_moment_diagonal() const;
    /// Rows `tracked_rows()` of the second moment (one row per tracked index).
    [[nodiscard]] Eigen::MatrixXd tracked_row_moments() const;

private:
    void flush() const;

    Index dim_;
    bool dense_;
    std::vector<Index> rows_;
    std::int64_t count_ = 0;
    // Mutable so that read access can fold in the pending batch.
    mutable Eigen::MatrixXd buffer_;
    mutable Index pending_ = 0;
    mutable Eigen::MatrixXd sum_;
    mutable Eigen::MatrixXd comp_;
    mutable Eigen::VectorXd mean_sum_;
    mutable Eigen::VectorXd mean_comp_;
    mutable Eigen::VectorXd diag_sum_;
    mutable Eigen::VectorXd diag_comp_;
    mutable Eigen::MatrixXd rows_sum_;
    mutable Eigen::MatrixXd rows_comp_;
};

/// ||A - B||_F / ||B||_F; throws ArgumentError for shape mismatch or zero B.
[[nodiscard]] double relative_frobenius_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& target);

/// (M C, ||M C - I||_F / ||I||_F).
[[nodiscard]] std::pair<Eigen::MatrixXd, double> mass_identity_deviation(const Eigen::MatrixXd& M,
                                                                        const Eigen::MatrixXd& C);
[[nodiscard]] std::pair<Eigen::MatrixXd, double> mass_identity_deviation(const ElementBlockMatrix& M,
                                                                        const Eigen::MatrixXd& C);

/// Row `index` of M C: the correlation of DOF `index` with every DOF.
[[nodiscard]] Eigen::VectorXd row_correlation(const Eigen::MatrixXd& C, const Eigen::MatrixXd& M, Index index);
[[nodiscard]] Eigen::VectorXd row_correlation(const Eigen::MatrixXd& C, const ElementBlockMatrix& M, Index index);

/// sum_{j != index} |row_j|.
[[nodiscard]] double off_index_mass(const Eigen::VectorXd& row, Index index);

/// Entrywise standard error of the second-moment estimator from n
/// independent zero-mean Gaussian samples with covariance C:
/// sqrt((C_ii C_jj + C_ij^2) / n).
[[nodiscard]] Eigen::MatrixXd gaussian_standard_errors(const Eigen::MatrixXd& C, double n);

/// Least-squares slope of log y against log x.
[[nodiscard]] double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace sdgm
