#include "sdgm/reference_element.hpp"

#include <array>

namespace sdgm {

Eigen::Vector2d edge_point(int edge, double t)
{
    switch (edge) {
    case 0: return {t, -1.0};
    case 1: return {1.0, t};
    case 2: return {-t, 1.0};
    case 3: return {-1.0, -t};
    default: throw ArgumentError("edge_point: local edge must be in 0..3");
    }
}

Eigen::Vector2d edge_tangent(int edge)
{
    static constexpr std::array<std::array<double, 2>, 4> tangents{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
    if (edge < 0 || edge > 3) {
        throw ArgumentError("edge_tangent: local edge must be in 0..3");
    }
    return {tangents[edge][0], tangents[edge][1]};
}

ReferenceElement::ReferenceElement(int p)
    : p_(p), nodes_(gauss_lobatto_nodes<double>(p)), quad_(gauss_legendre<double>(p + 1))
{
    diff_ = differentiation_matrix(nodes_);
    interp_ = interpolation_matrix(nodes_, quad_.nodes);
    deriv_ = interp_ * diff_;
}

Eigen::Vector2d ReferenceElement::node(int a) const
{
    return {nodes_(a % (p_ + 1)), nodes_(a / (p_ + 1))};
}

Eigen::VectorXd ReferenceElement::tensor_basis_eval(double xi, double eta) const
{
    const Eigen::MatrixXd lx = interpolation_matrix<double>(nodes_, VectorXd::Constant(1, xi));
    const Eigen::MatrixXd ly = interpolation_matrix<double>(nodes_, VectorXd::Constant(1, eta));
    VectorXd out(num_nodes());
    for (int j = 0; j <= p_; ++j) {
        for (int i = 0; i <= p_; ++i) {
            out(node_index(i, j)) = lx(0, i) * ly(0, j);
        }
    }
    return out;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> ReferenceElement::tensor_basis_grad(double xi, double eta) const
{
    const Eigen::MatrixXd lx = interpolation_matrix<double>(nodes_, VectorXd::Constant(1, xi));
    const Eigen::MatrixXd ly = interpolation_matrix<double>(nodes_, VectorXd::Constant(1, eta));
    const Eigen::MatrixXd dx = lx * diff_;
    const Eigen::MatrixXd dy = ly * diff_;
    Eigen::Matrix<double, 2, Eigen::Dynamic> out(2, num_nodes());
    for (int j = 0; j <= p_; ++j) {
        for (int i = 0; i <= p_; ++i) {
            out(0, node_index(i, j)) = dx(0, i) * ly(0, j);
            out(1, node_index(i, j)) = lx(0, i) * dy(0, j);
        }
    }
    return out;
}

std::vector<int> ReferenceElement::edge_nodes(int edge) const
{
    std::vector<int> out;
    out.reserve(p_ + 1);
    for (int k = 0; k <= p_; ++k) {
        switch (edge) {
        case 0: out.push_back(node_index(k, 0)); break;
        case 1: out.push_back(node_index(p_, k)); break;
        case 2: out.push_back(node_index(p_ - k, p_)); break;
        case 3: out.push_back(node_index(0, p_ - k)); break;
        default: throw ArgumentError("edge_nodes: local edge must be in 0..3");
        }
    }
    return out;
}

ReferenceElement::TensorEvaluation ReferenceElement::evaluate_on_tensor_grid(const VectorXd& points_1d) const
{
    const Eigen::MatrixXd l = interpolation_matrix(nodes_, points_1d);
    const Eigen::MatrixXd d = l * diff_;
    const Eigen::Index m = points_1d.size();
    TensorEvaluation out{Matrix(m * m, num_nodes()), Matrix(m * m, num_nodes()), Matrix(m * m, num_nodes())};
    for (Eigen::Index qy = 0; qy < m; ++qy) {
        for (Eigen::Index qx = 0; qx < m; ++qx) {
            const Eigen::Index q = qx + m * qy;
            for (int j = 0; j <= p_; ++j) {
                for (int i = 0; i <= p_; ++i) {
                    const int a = node_index(i, j);
                    out.values(q, a) = l(qx, i) * l(qy, j);
                    out.d_xi(q, a) = d(qx, i) * l(qy, j);
                    out.d_eta(q, a) = l(qx, i) * d(qy, j);
                }
            }
        }
    }
    return out;
}

Eigen::MatrixXd ReferenceElement::evaluate_on_edge(int edge, const VectorXd& t) const
{
    Matrix out(t.size(), num_nodes());
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        const Eigen::Vector2d x = edge_point(edge, t(k));
        out.row(k) = tensor_basis_eval(x(0), x(1)).transpose();
    }
    return out;
}

} // namespace sdgm
