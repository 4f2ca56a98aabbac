#pragma once

// Fluctuation-dissipation relations for linear stochastic systems
//
//   dZ = L Z dt + Q dW,   G = Q Q^T,
//
// in continuous time and for the Euler-Maruyama chain
//
//   Z^{n+1} = (I + dt L) Z^n + sqrt(dt) Q xi^n.
//
// Everything here is dense and meant for problems of at most a few thousand
// unknowns. The same routines serve as the reference oracle for the sparse,
// element-blocked code paths.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "sdgm/errors.hpp"

namespace sdgm {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename A, typename B>
void require_same_square(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                         const char* what)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw ArgumentError(std::string(what) + ": expected square matrices of equal size, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

template <typename Scalar>
void require_nonnegative_dt(Scalar dt, const char* what)
{
    if (!(dt >= Scalar(0)) || !std::isfinite(static_cast<double>(dt))) {
        throw ArgumentError(std::string(what) + ": time step must be finite and >= 0");
    }
}

template <typename Derived>
Eigen::FullPivLU<DenseMatrix<typename Derived::Scalar>> checked_lu(
    const Eigen::MatrixBase<Derived>& m, const char* what)
{
    Eigen::FullPivLU<DenseMatrix<typename Derived::Scalar>> lu(m);
    if (!lu.isInvertible()) {
        throw SingularOperatorError(std::string(what) + ": matrix is singular (rank " +
                                    std::to_string(lu.rank()) + " of " +
                                    std::to_string(m.rows()) + ")");
    }
    return lu;
}

} // namespace detail

/// Noise covariance that keeps C stationary under dZ = L Z dt + Q dW:
/// G = -L C - (L C)^T.
template <typename DerivedL, typename DerivedC>
DenseMatrix<typename DerivedL::Scalar> noise_covariance_spatial(
    const Eigen::MatrixBase<DerivedL>& L, const Eigen::MatrixBase<DerivedC>& C)
{
    detail::require_same_square(L, C, "noise_covariance_spatial");
    const DenseMatrix<typename DerivedL::Scalar> LC = L * C;
    return -LC - LC.transpose();
}

/// Stationary covariance C = -1/2 L^{-1} G. Only meaningful when L C comes
/// out symmetric; check with commutation_defect().
template <typename DerivedL, typename DerivedG>
DenseMatrix<typename DerivedL::Scalar> steady_state_covariance_spatial(
    const Eigen::MatrixBase<DerivedL>& L, const Eigen::MatrixBase<DerivedG>& G)
{
    using Scalar = typename DerivedL::Scalar;
    detail::require_same_square(L, G, "steady_state_covariance_spatial");
    const auto lu = detail::checked_lu(L, "steady_state_covariance_spatial");
    return Scalar(-0.5) * lu.solve(G);
}

/// Noise covariance for the Euler-Maruyama chain:
/// G = -L C - (L C)^T - dt L C L^T. dt = 0 reproduces the spatial relation.
template <typename DerivedL, typename DerivedC>
DenseMatrix<typename DerivedL::Scalar> noise_covariance_temporal(
    const Eigen::MatrixBase<DerivedL>& L, const Eigen::MatrixBase<DerivedC>& C,
    typename DerivedL::Scalar dt)
{
    detail::require_same_square(L, C, "noise_covariance_temporal");
    detail::require_nonnegative_dt(dt, "noise_covariance_temporal");
    const DenseMatrix<typename DerivedL::Scalar> LC = L * C;
    if (dt == 0) {
        return -LC - LC.transpose();
    }
    return -LC - LC.transpose() - dt * (LC * L.transpose());
}

/// Stationary covariance of the Euler-Maruyama chain when L C is symmetric:
/// C = -1/2 L^{-1} (I + dt/2 L)^{-1} G. Writing the shift with L^T instead
/// is only equivalent for symmetric L; the DG generator M^{-1} A is not.
template <typename DerivedL, typename DerivedG>
DenseMatrix<typename DerivedL::Scalar> steady_state_covariance_temporal(
    const Eigen::MatrixBase<DerivedL>& L, const Eigen::MatrixBase<DerivedG>& G,
    typename DerivedL::Scalar dt)
{
    using Scalar = typename DerivedL::Scalar;
    detail::require_same_square(L, G, "steady_state_covariance_temporal");
    detail::require_nonnegative_dt(dt, "steady_state_covariance_temporal");
    const Eigen::Index n = L.rows();
    const DenseMatrix<Scalar> shift =
        DenseMatrix<Scalar>::Identity(n, n) + Scalar(0.5) * dt * L;
    const auto shift_lu = detail::checked_lu(shift, "steady_state_covariance_temporal (I + dt/2 L)");
    const auto lu = detail::checked_lu(L, "steady_state_covariance_temporal (L)");
    return Scalar(-0.5) * lu.solve(shift_lu.solve(G));
}

/// ||L C - (L C)^T||_F / ||L C||_F. Zero when the stationary relations are exact.
template <typename DerivedL, typename DerivedC>
typename DerivedL::Scalar commutation_defect(const Eigen::MatrixBase<DerivedL>& L,
                                             const Eigen::MatrixBase<DerivedC>& C)
{
    detail::require_same_square(L, C, "commutation_defect");
    const DenseMatrix<typename DerivedL::Scalar> LC = L * C;
    const auto norm = LC.norm();
    if (norm == 0) {
        return 0;
    }
    return (LC - LC.transpose()).norm() / norm;
}

/// Relative residual of the continuous Lyapunov equation L C + C L^T + G = 0.
template <typename DerivedL, typename DerivedC, typename DerivedG>
typename DerivedL::Scalar lyapunov_residual(const Eigen::MatrixBase<DerivedL>& L,
                                            const Eigen::MatrixBase<DerivedC>& C,
                                            const Eigen::MatrixBase<DerivedG>& G)
{
    const DenseMatrix<typename DerivedL::Scalar> R = L * C + C * L.transpose() + G;
    const auto scale = std::max(G.norm(), (L * C).norm());
    return scale == 0 ? R.norm() : R.norm() / scale;
}

/// Predicted covariance <Z_{t+lag} Z_t^T> = exp(lag L) C of the continuous system.
template <typename DerivedL, typename DerivedC>
DenseMatrix<typename DerivedL::Scalar> lag_autocovariance(const Eigen::MatrixBase<DerivedL>& L,
                                                          const Eigen::MatrixBase<DerivedC>& C,
                                                          typename DerivedL::Scalar lag)
{
    using Scalar = typename DerivedL::Scalar;
    detail::require_same_square(L, C, "lag_autocovariance");
    if (!(lag >= Scalar(0))) {
        throw ArgumentError("lag_autocovariance: lag must be >= 0");
    }
    if (lag == 0) {
        return C;
    }
    const DenseMatrix<Scalar> scaled = lag * L;
    return scaled.exp() * C;
}

/// Predicted covariance <Z^{m+steps} (Z^m)^T> = (I + dt L)^steps C of the Euler chain.
template <typename DerivedL, typename DerivedC>
DenseMatrix<typename DerivedL::Scalar> lag_autocovariance_discrete(
    const Eigen::MatrixBase<DerivedL>& L, const Eigen::MatrixBase<DerivedC>& C,
    std::int64_t steps, typename DerivedL::Scalar dt)
{
    using Scalar = typename DerivedL::Scalar;
    detail::require_same_square(L, C, "lag_autocovariance_discrete");
    detail::require_nonnegative_dt(dt, "lag_autocovariance_discrete");
    if (steps < 0) {
        throw ArgumentError("lag_autocovariance_discrete: negative step lag");
    }
    const Eigen::Index n = L.rows();
    DenseMatrix<Scalar> base = DenseMatrix<Scalar>::Identity(n, n) + dt * L;
    DenseMatrix<Scalar> power = DenseMatrix<Scalar>::Identity(n, n);
    for (auto k = steps; k > 0; k >>= 1) {
        if (k & 1) {
            power = power * base;
        }
        base = base * base;
    }
    return power * C;
}

/// Any Q with Q Q^T = G for symmetric positive-semidefinite G. Eigenvalues
/// that are negative only by round-off (>= -tol * max|eig|) are clipped to zero.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> covariance_factor(const Eigen::MatrixBase<Derived>& G,
                                                        typename Derived::Scalar tol = 1e-10)
{
    using Scalar = typename Derived::Scalar;
    if (G.rows() != G.cols()) {
        throw ArgumentError("covariance_factor: matrix must be square");
    }
    const DenseMatrix<Scalar> sym = Scalar(0.5) * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw FactorizationError("covariance_factor: eigensolver failed");
    }
    const auto& values = eig.eigenvalues();
    const Scalar scale = values.cwiseAbs().maxCoeff();
    if (values.minCoeff() < -tol * scale) {
        throw FactorizationError("covariance_factor: matrix is indefinite (min eigenvalue " +
                                 std::to_string(static_cast<double>(values.minCoeff())) + ")");
    }
    return eig.eigenvectors() * values.cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal();
}

} // namespace sdgm
