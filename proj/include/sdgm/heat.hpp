#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "sdgm/operators.hpp"

namespace sdgm {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Nodal interpolant of f.
[[nodiscard]] Eigen::VectorXd interpolate(const DgDiscretization& disc, const ScalarField& f);

/// L2 projection M^{-1} int f phi, integrated with p + p_geo + 2 points per direction.
[[nodiscard]] Eigen::VectorXd l2_project(const DgDiscretization& disc, const ScalarField& f);

/// L2 norm of u_h - exact, integrated with p + p_geo + 2 points per direction.
[[nodiscard]] double l2_error(const DgDiscretization& disc, const Eigen::VectorXd& u, const ScalarField& exact);

/// Deterministic heat problem u_t = Lap u + f with u = g_D on Dirichlet faces
/// and du/dn = g_N . n on Neumann faces. Empty functions mean zero.
struct HeatProblem {
    ScalarField initial;
    ScalarField source;
    ScalarField dirichlet;
    VectorField neumann;
};

struct HeatResult {
    Eigen::VectorXd u;
    long steps = 0;
    double time = 0;
    /// u^T M u after every step (index 0 is the initial state).
    std::vector<double> energy;
};

/// Explicit Euler for M u_t = A u + b + M f, with f the L2 projection of the
/// source and b collecting the boundary
/// data. Under strong Dirichlet the boundary DOFs are reset to the nodal
/// values of g_D after every step. Throws DivergenceError naming the step if
/// the iterate becomes non-finite or grows by more than 1e12.
[[nodiscard]] HeatResult solve_deterministic_heat(const DgDiscretization& disc, const HeatProblem& problem,
                                                  double dt, double t_final, bool track_energy = false);

} // namespace sdgm
