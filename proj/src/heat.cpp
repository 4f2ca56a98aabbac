#include "sdgm/heat.hpp"

#include <cmath>
#include <string>

#include "sdgm/errors.hpp"

namespace sdgm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd interpolate(const DgDiscretization& disc, const ScalarField& f)
{
    const auto& x = disc.node_positions();
    VectorXd out(x.cols());
    for (Index i = 0; i < x.cols(); ++i) {
        out(i) = f(x.col(i));
    }
    return out;
}

namespace {

// Calls visit(e, q, point, weight * |J|, basis row) at every point of a
// (p + p_geo + 2)^2 tensor rule on every element.
template <typename Visit>
void integrate_fine(const DgDiscretization& disc, Visit&& visit)
{
    const QuadMesh& mesh = disc.mesh();
    const auto rule = gauss_legendre<double>(disc.degree() + mesh.geometry_degree() + 2);
    const auto basis = disc.reference().evaluate_on_tensor_grid(rule.nodes);
    const auto geo = mesh.geometry_element().evaluate_on_tensor_grid(rule.nodes);
    const Index m = rule.size();
    for (Index e = 0; e < disc.num_elements(); ++e) {
        const Eigen::Matrix2Xd& X = mesh.geometry_nodes(e);
        const MatrixXd pts = geo.values * X.transpose();
        const VectorXd det = (geo.d_xi * X.row(0).transpose()).cwiseProduct(geo.d_eta * X.row(1).transpose()) -
                             (geo.d_eta * X.row(0).transpose()).cwiseProduct(geo.d_xi * X.row(1).transpose());
        for (Index qy = 0; qy < m; ++qy) {
            for (Index qx = 0; qx < m; ++qx) {
                const Index q = qx + m * qy;
                visit(e, pts.row(q).transpose(), rule.weights(qx) * rule.weights(qy) * det(q), basis.values.row(q));
            }
        }
    }
}

} // namespace

VectorXd l2_project(const DgDiscretization& disc, const ScalarField& f)
{
    const Index nloc = disc.nodes_per_element();
    VectorXd load = VectorXd::Zero(disc.num_dofs());
    integrate_fine(disc, [&](Index e, const Eigen::Vector2d& x, double w, const auto& phi) {
        load.segment(e * nloc, nloc) += (w * f(x)) * phi.transpose();
    });
    VectorXd out;
    disc.mass_inverse().apply(load, out);
    return out;
}

double l2_error(const DgDiscretization& disc, const VectorXd& u, const ScalarField& exact)
{
    if (u.size() != disc.num_dofs()) {
        throw ArgumentError("l2_error: vector length mismatch");
    }
    const Index nloc = disc.nodes_per_element();
    double sum = 0;
    integrate_fine(disc, [&](Index e, const Eigen::Vector2d& x, double w, const auto& phi) {
        const double diff = phi.dot(u.segment(e * nloc, nloc)) - exact(x);
        sum += w * diff * diff;
    });
    return std::sqrt(sum);
}

HeatResult solve_deterministic_heat(const DgDiscretization& disc, const HeatProblem& problem, double dt,
                                    double t_final, bool track_energy)
{
    if (!(dt > 0) || !(t_final >= 0)) {
        throw ArgumentError("solve_deterministic_heat: need dt > 0 and t_final >= 0");
    }
    const Index n = disc.num_dofs();
    const Index nloc = disc.nodes_per_element();
    const bool strong = disc.regime() == Regime::DirichletStrong;

    // Boundary data enter as M sigma = G u + g_sigma and M u_t = D sigma + E u + b.
    VectorXd g_sigma = VectorXd::Zero(2 * n);
    VectorXd b = VectorXd::Zero(n);
    const double p1 = disc.degree() + 1;
    for (const auto& q : boundary_quadrature(disc.mesh(), disc.reference())) {
        const Index e = q.element;
        if (q.tag == BoundaryTag::Neumann && problem.neumann) {
            VectorXd g(q.ds.size());
            for (Index k = 0; k < g.size(); ++k) {
                g(k) = problem.neumann(q.points.col(k)).dot(q.normals.col(k)) * q.ds(k);
            }
            b.segment(e * nloc, nloc) += q.basis.transpose() * g;
        }
        if (q.tag == BoundaryTag::Dirichlet && problem.dirichlet) {
            VectorXd g(q.ds.size());
            for (Index k = 0; k < g.size(); ++k) {
                g(k) = problem.dirichlet(q.points.col(k)) * q.ds(k);
            }
            for (int c = 0; c < 2; ++c) {
                g_sigma.segment((2 * e + c) * nloc, nloc) += q.basis.transpose() * (g.cwiseProduct(q.normals.row(c).transpose()));
            }
            if (disc.regime() == Regime::DirichletWeak) {
                const double c11 = disc.parameters().c11_scale * p1 * p1 / q.length;
                b.segment(e * nloc, nloc) += c11 * (q.basis.transpose() * g);
            }
        }
    }
    {
        VectorXd s;
        VectorXd y;
        disc.mass_inverse().apply(g_sigma, s, 2);
        disc.divergence().apply(s, y);
        b += y;
    }
    if (problem.source) {
        b += disc.mass() * l2_project(disc, problem.source);
    }
    VectorXd forcing;  // M^{-1} b
    disc.mass_inverse().apply(b, forcing);

    VectorXd boundary_values;
    if (strong) {
        boundary_values = problem.dirichlet ? interpolate(disc, problem.dirichlet) : VectorXd::Zero(n);
        forcing = disc.interior_mask().cwiseProduct(forcing);
    }

    HeatResult result;
    result.u = problem.initial ? interpolate(disc, problem.initial) : VectorXd::Zero(n);
    auto reset_boundary = [&](VectorXd& u) {
        for (Index i : disc.boundary_indices()) {
            u(i) = boundary_values(i);
        }
    };
    if (strong) {
        reset_boundary(result.u);
    }
    auto energy = [&](const VectorXd& u) { return u.dot(disc.mass() * u); };
    if (track_energy) {
        result.energy.push_back(energy(result.u));
    }

    const long steps = std::lround(std::ceil(t_final / dt - 1e-9));
    const double limit = 1e12 * (1 + result.u.cwiseAbs().maxCoeff() + forcing.cwiseAbs().maxCoeff());
    VectorXd lu;
    for (long step = 0; step < steps; ++step) {
        if (strong) {
            // L~ only sees interior values; boundary data act through the full operator.
            disc.apply_laplacian(result.u, lu);
            VectorXd tmp;
            disc.mass_inverse().apply(lu, tmp);
            lu = disc.interior_mask().cwiseProduct(tmp);
        } else {
            disc.apply_generator(result.u, lu);
        }
        result.u += dt * (lu + forcing);
        if (strong) {
            reset_boundary(result.u);
        }
        const double size = result.u.cwiseAbs().maxCoeff();
        if (!std::isfinite(size) || size > limit) {
            throw DivergenceError("heat solver diverged at step " + std::to_string(step + 1) +
                                  " (dt = " + std::to_string(dt) + " likely violates the stability bound)");
        }
        if (track_energy) {
            result.energy.push_back(energy(result.u));
        }
    }
    result.steps = steps;
    result.time = static_cast<double>(steps) * dt;
    return result;
}

} // namespace sdgm
