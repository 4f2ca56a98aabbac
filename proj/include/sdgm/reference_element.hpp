#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sdgm/errors.hpp"

namespace sdgm {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
template <typename Scalar>
std::pair<Scalar, Scalar> legendre(int n, Scalar x)
{
    if (n == 0) {
        return {Scalar(1), Scalar(0)};
    }
    Scalar p_prev = 1;
    Scalar p = x;
    Scalar dp_prev = 0;
    Scalar dp = 1;
    for (int k = 2; k <= n; ++k) {
        const Scalar p_next = (Scalar(2 * k - 1) * x * p - Scalar(k - 1) * p_prev) / Scalar(k);
        const Scalar dp_next = dp_prev + Scalar(2 * k - 1) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    return {p, dp};
}

template <typename Scalar>
struct QuadratureRule {
    Vector<Scalar> nodes;
    Vector<Scalar> weights;

    [[nodiscard]] Eigen::Index size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n - 1.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int n)
{
    if (n < 1) {
        throw ArgumentError("gauss_legendre: need at least one point");
    }
    QuadratureRule<Scalar> rule{Vector<Scalar>(n), Vector<Scalar>(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) /
                            (Scalar(n) + Scalar(0.5)));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const Scalar step = p / dp;
            x -= step;
            if (std::abs(step) < 4 * std::numeric_limits<Scalar>::epsilon()) {
                break;
            }
        }
        const auto [p, dp] = legendre(n, x);
        const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
        rule.nodes(i) = -x;
        rule.nodes(n - 1 - i) = x;
        rule.weights(i) = w;
        rule.weights(n - 1 - i) = w;
    }
    if (n % 2 == 1) {
        rule.nodes(n / 2) = 0;
    }
    return rule;
}

/// The p + 1 Gauss-Lobatto points: -1, the roots of P_p', and 1.
template <typename Scalar = double>
Vector<Scalar> gauss_lobatto_nodes(int p)
{
    if (p < 1) {
        throw ArgumentError("gauss_lobatto_nodes: p = " + std::to_string(p) +
                            " unsupported, need p >= 1");
    }
    Vector<Scalar> x(p + 1);
    x(0) = -1;
    x(p) = 1;
    for (int i = 1; i < p; ++i) {
        // Newton on P_p'(x), using (1 - x^2) P_p'' = 2x P_p' - p(p+1) P_p.
        Scalar xi = -std::cos(std::numbers::pi_v<Scalar> * Scalar(i) / Scalar(p));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [lp, dlp] = legendre(p, xi);
            const Scalar d2lp = (Scalar(2) * xi * dlp - Scalar(p * (p + 1)) * lp) / (Scalar(1) - xi * xi);
            const Scalar step = dlp / d2lp;
            xi -= step;
            if (std::abs(step) < 4 * std::numeric_limits<Scalar>::epsilon()) {
                break;
            }
        }
        x(i) = xi;
    }
    for (int i = 0; i < (p + 1) / 2; ++i) {
        const Scalar s = Scalar(0.5) * (x(p - i) - x(i));
        x(i) = -s;
        x(p - i) = s;
    }
    if (p % 2 == 0) {
        x(p / 2) = 0;
    }
    return x;
}

template <typename Scalar>
Vector<Scalar> barycentric_weights(const Vector<Scalar>& nodes)
{
    const Eigen::Index n = nodes.size();
    Vector<Scalar> w = Vector<Scalar>::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const Scalar diff = nodes(i) - nodes(j);
            if (diff == Scalar(0)) {
                throw ArgumentError("barycentric_weights: duplicate node at index " + std::to_string(j));
            }
            w(i) /= diff;
        }
    }
    return w;
}

/// D(i, j) = l_j'(x_i) for the Lagrange basis on the given nodes.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> differentiation_matrix(const Vector<Scalar>& nodes)
{
    const Vector<Scalar> w = barycentric_weights(nodes);
    const Eigen::Index n = nodes.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Scalar diag = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j) {
                d(i, j) = (w(j) / w(i)) / (nodes(i) - nodes(j));
                diag -= d(i, j);
            }
        }
        d(i, i) = diag;
    }
    return d;
}

/// I(k, j) = l_j(points_k), barycentric form. Points outside [-1, 1] extrapolate.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> interpolation_matrix(const Vector<Scalar>& nodes,
                                                                           const Vector<Scalar>& points)
{
    const Vector<Scalar> w = barycentric_weights(nodes);
    const Eigen::Index n = nodes.size();
    const Eigen::Index m = points.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m, n);
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::Index exact = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (points(k) == nodes(j)) {
                exact = j;
            }
        }
        if (exact >= 0) {
            out.row(k).setZero();
            out(k, exact) = 1;
            continue;
        }
        Scalar denom = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            out(k, j) = w(j) / (points(k) - nodes(j));
            denom += out(k, j);
        }
        out.row(k) /= denom;
    }
    return out;
}

/// Tensor-product Gauss-Lobatto nodal element of degree p on [-1, 1]^2.
///
/// Local node (i, j) -- i along xi, j along eta -- has index i + (p + 1) j.
/// Volume integrals use the (p + 1)^2-point tensor Gauss-Legendre rule, which
/// is exact for mass products on affine elements.
class ReferenceElement {
public:
    using Matrix = Eigen::MatrixXd;
    using VectorXd = Eigen::VectorXd;

    explicit ReferenceElement(int p);

    [[nodiscard]] int degree() const noexcept { return p_; }
    [[nodiscard]] int nodes_per_edge() const noexcept { return p_ + 1; }
    [[nodiscard]] int num_nodes() const noexcept { return (p_ + 1) * (p_ + 1); }
    [[nodiscard]] int node_index(int i, int j) const noexcept { return i + (p_ + 1) * j; }

    [[nodiscard]] const VectorXd& nodes_1d() const noexcept { return nodes_; }
    [[nodiscard]] const QuadratureRule<double>& quadrature() const noexcept { return quad_; }
    [[nodiscard]] const Matrix& diff_1d() const noexcept { return diff_; }
    /// (p+1) x (p+1): nodal values -> values at the Gauss-Legendre points.
    [[nodiscard]] const Matrix& interp_to_quad() const noexcept { return interp_; }
    /// (p+1) x (p+1): nodal values -> derivative at the Gauss-Legendre points.
    [[nodiscard]] const Matrix& deriv_to_quad() const noexcept { return deriv_; }

    /// Reference coordinates of local node a.
    [[nodiscard]] Eigen::Vector2d node(int a) const;

    /// Values of all (p+1)^2 basis functions at (xi, eta).
    [[nodiscard]] VectorXd tensor_basis_eval(double xi, double eta) const;
    /// Rows: d/dxi and d/deta of all basis functions at (xi, eta).
    [[nodiscard]] Eigen::Matrix<double, 2, Eigen::Dynamic> tensor_basis_grad(double xi, double eta) const;

    /// Local nodes on a reference edge (0: eta=-1, 1: xi=1, 2: eta=1, 3: xi=-1),
    /// ordered along the counterclockwise edge parameter.
    [[nodiscard]] std::vector<int> edge_nodes(int edge) const;

    /// (n_points^2 x num_nodes) evaluation matrices of the basis and its two
    /// reference derivatives at the tensor points of a 1-D point set.
    struct TensorEvaluation {
        Matrix values;
        Matrix d_xi;
        Matrix d_eta;
    };
    [[nodiscard]] TensorEvaluation evaluate_on_tensor_grid(const VectorXd& points_1d) const;

    /// Basis values at points along a reference edge, parameter t in [-1, 1].
    [[nodiscard]] Matrix evaluate_on_edge(int edge, const VectorXd& t) const;

private:
    int p_;
    VectorXd nodes_;
    QuadratureRule<double> quad_;
    Matrix diff_;
    Matrix interp_;
    Matrix deriv_;
};

/// Reference coordinates of the counterclockwise edge parameter t on edge k.
Eigen::Vector2d edge_point(int edge, double t);
/// d(xi, eta)/dt along edge k.
Eigen::Vector2d edge_tangent(int edge);

} // namespace sdgm
