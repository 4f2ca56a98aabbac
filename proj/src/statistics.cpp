#include "sdgm/statistics.hpp"

#include <cmath>
#include <string>

#include "sdgm/errors.hpp"

namespace sdgm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Kahan step; `comp` holds minus the lost low-order part.
template <typename S, typename V>
void kahan_add(S& sum, S& comp, const V& value)
{
    const S y = value - comp;
    const S t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

} // namespace

CovarianceAccumulator::CovarianceAccumulator(Index dim, bool dense, std::vector<Index> rows)
    : dim_(dim), dense_(dense), rows_(std::move(rows))
{
    if (dim <= 0) {
        throw ArgumentError("CovarianceAccumulator: dimension must be positive");
    }
    for (Index r : rows_) {
        if (r < 0 || r >= dim) {
            throw ArgumentError("CovarianceAccumulator: tracked row " + std::to_string(r) + " out of range");
        }
    }
    buffer_.resize(dim, kBatch);
    if (dense_) {
        sum_ = MatrixXd::Zero(dim, dim);
        comp_ = MatrixXd::Zero(dim, dim);
    }
    mean_sum_ = VectorXd::Zero(dim);
    mean_comp_ = VectorXd::Zero(dim);
    diag_sum_ = VectorXd::Zero(dim);
    diag_comp_ = VectorXd::Zero(dim);
    rows_sum_ = MatrixXd::Zero(static_cast<Index>(rows_.size()), dim);
    rows_comp_ = MatrixXd::Zero(static_cast<Index>(rows_.size()), dim);
}

void CovarianceAccumulator::add(const VectorXd& u)
{
    if (u.size() != dim_) {
        throw ArgumentError("CovarianceAccumulator::add: sample length " + std::to_string(u.size()) +
                            ", expected " + std::to_string(dim_));
    }
    buffer_.col(pending_++) = u;
    ++count_;
    if (pending_ == kBatch) {
        flush();
    }
}

void CovarianceAccumulator::flush() const
{
    if (pending_ == 0) {
        return;
    }
    const auto B = buffer_.leftCols(pending_);
    if (dense_) {
        MatrixXd P = MatrixXd::Zero(dim_, dim_);
        P.selfadjointView<Eigen::Lower>().rankUpdate(B);
        kahan_add(sum_, comp_, P);
    }
    kahan_add(mean_sum_, mean_comp_, VectorXd(B.rowwise().sum()));
    kahan_add(diag_sum_, diag_comp_, VectorXd(B.rowwise().squaredNorm()));
    if (!rows_.empty()) {
        MatrixXd picked(static_cast<Index>(rows_.size()), pending_);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            picked.row(static_cast<Index>(r)) = B.row(rows_[r]);
        }
        kahan_add(rows_sum_, rows_comp_, MatrixXd(picked * B.transpose()));
    }
    pending_ = 0;
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other)
{
    if (other.dim_ != dim_ || other.dense_ != dense_ || other.rows_ != rows_) {
        throw ArgumentError("CovarianceAccumulator::merge: accumulators have different layouts");
    }
    flush();
    other.flush();
    if (dense_) {
        kahan_add(sum_, comp_, other.sum_);
        kahan_add(sum_, comp_, MatrixXd(-other.comp_));
    }
    kahan_add(mean_sum_, mean_comp_, other.mean_sum_);
    kahan_add(mean_sum_, mean_comp_, VectorXd(-other.mean_comp_));
    kahan_add(diag_sum_, diag_comp_, other.diag_sum_);
    kahan_add(diag_sum_, diag_comp_, VectorXd(-other.diag_comp_));
    if (!rows_.empty()) {
        kahan_add(rows_sum_, rows_comp_, other.rows_sum_);
        kahan_add(rows_sum_, rows_comp_, MatrixXd(-other.rows_comp_));
    }
    count_ += other.count_;
}

MatrixXd CovarianceAccumulator::covariance() const
{
    if (!dense_) {
        throw ArgumentError("CovarianceAccumulator::covariance: accumulator is not dense");
    }
    if (count_ == 0) {
        throw ArgumentError("CovarianceAccumulator::covariance: no samples");
    }
    flush();
    MatrixXd lower = (sum_ - comp_).triangularView<Eigen::Lower>();
    MatrixXd full = lower + lower.transpose();
    full.diagonal() = lower.diagonal();
    return full / static_cast<double>(count_);
}

VectorXd CovarianceAccumulator::mean() const
{
    if (count_ == 0) {
        throw ArgumentError("CovarianceAccumulator::mean: no samples");
    }
    flush();
    return (mean_sum_ - mean_comp_) / static_cast<double>(count_);
}

VectorXd CovarianceAccumulator::second_moment_diagonal() const
{
    if (count_ == 0) {
        throw ArgumentError("CovarianceAccumulator: no samples");
    }
    flush();
    return (diag_sum_ - diag_comp_) / static_cast<double>(count_);
}

MatrixXd CovarianceAccumulator::tracked_row_moments() const
{
    if (count_ == 0) {
        throw ArgumentError("CovarianceAccumulator: no samples");
    }
    flush();
    return (rows_sum_ - rows_comp_) / static_cast<double>(count_);
}

double relative_frobenius_error(const MatrixXd& estimate, const MatrixXd& target)
{
    if (estimate.rows() != target.rows() || estimate.cols() != target.cols()) {
        throw ArgumentError("relative_frobenius_error: shape mismatch");
    }
    const double norm = target.norm();
    if (norm == 0) {
        throw ArgumentError("relative_frobenius_error: target has zero norm");
    }
    return (estimate - target).norm() / norm;
}

namespace {

std::pair<MatrixXd, double> identity_deviation(MatrixXd product)
{
    const double n = static_cast<double>(product.rows());
    const double dev = (product - MatrixXd::Identity(product.rows(), product.cols())).norm() / std::sqrt(n);
    return {std::move(product), dev};
}

void require_square_match(Index m, const MatrixXd& C, const char* what)
{
    if (C.rows() != m || C.cols() != m) {
        throw ArgumentError(std::string(what) + ": shape mismatch");
    }
}

} // namespace

std::pair<MatrixXd, double> mass_identity_deviation(const MatrixXd& M, const MatrixXd& C)
{
    require_square_match(M.rows(), C, "mass_identity_deviation");
    return identity_deviation(M * C);
}

std::pair<MatrixXd, double> mass_identity_deviation(const ElementBlockMatrix& M, const MatrixXd& C)
{
    require_square_match(M.rows(), C, "mass_identity_deviation");
    MatrixXd product(C.rows(), C.cols());
    const Index bs = M.block_size();
    for (Index e = 0; e < M.num_blocks(); ++e) {
        product.middleRows(e * bs, bs).noalias() = M.block(e) * C.middleRows(e * bs, bs);
    }
    return identity_deviation(std::move(product));
}

VectorXd row_correlation(const MatrixXd& C, const MatrixXd& M, Index index)
{
    require_square_match(M.rows(), C, "row_correlation");
    if (index < 0 || index >= C.rows()) {
        throw ArgumentError("row_correlation: index " + std::to_string(index) + " out of range");
    }
    return (M.row(index) * C).transpose();
}

VectorXd row_correlation(const MatrixXd& C, const ElementBlockMatrix& M, Index index)
{
    require_square_match(M.rows(), C, "row_correlation");
    if (index < 0 || index >= C.rows()) {
        throw ArgumentError("row_correlation: index " + std::to_string(index) + " out of range");
    }
    const Index bs = M.block_size();
    const Index e = index / bs;
    return (M.block(e).row(index - e * bs) * C.middleRows(e * bs, bs)).transpose();
}

double off_index_mass(const VectorXd& row, Index index)
{
    if (index < 0 || index >= row.size()) {
        throw ArgumentError("off_index_mass: index out of range");
    }
    return row.cwiseAbs().sum() - std::abs(row(index));
}

MatrixXd gaussian_standard_errors(const MatrixXd& C, double n)
{
    if (!(n > 0)) {
        throw ArgumentError("gaussian_standard_errors: sample count must be positive");
    }
    const VectorXd d = C.diagonal();
    return ((d * d.transpose()).array() + C.array().square()).sqrt() / std::sqrt(n);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw ArgumentError("log_log_slope: need at least two (x, y) pairs of equal count");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0;
    double sy = 0;
    double sxx = 0;
    double sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) {
            throw ArgumentError("log_log_slope: values must be positive");
        }
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace sdgm
