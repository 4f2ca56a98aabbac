#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sdgm/errors.hpp"
#include "sdgm/heat.hpp"
#include "support.hpp"

using namespace sdgm;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

constexpr double pi = std::numbers::pi;

double cos_cos(const Vector2d& x)
{
    return std::cos(pi * x(0)) * std::cos(pi * x(1));
}

// Stationary manufactured solution: u_t = Lap u + 2 pi^2 u_exact keeps u_exact.
double periodic_error(int n, double t_final)
{
    const DgDiscretization d(test::periodic_square(n), 1, Regime::Periodic);
    HeatProblem pr;
    pr.initial = cos_cos;
    pr.source = [](const Vector2d& x) { return 2 * pi * pi * cos_cos(x); };
    const double dt = 1.0 / d.spectral_radius_estimate();
    return l2_error(d, solve_deterministic_heat(d, pr, dt, t_final).u, cos_cos);
}

} // namespace

TEST(Heat, PeriodicLinearRateIsTwo)
{
    const double e8 = periodic_error(8, 0.5);
    const double e16 = periodic_error(16, 0.5);
    EXPECT_GE(e8 / e16, 3.5);
    EXPECT_LE(e8 / e16, 4.5);
}

TEST(Heat, NeumannAnnulusHighOrder)
{
    auto exact = [](const Vector2d& x) { return std::sin(2 * x(0)) * std::cos(1.5 * x(1)); };
    auto grad = [](const Vector2d& x) {
        return Vector2d(2 * std::cos(2 * x(0)) * std::cos(1.5 * x(1)), -1.5 * std::sin(2 * x(0)) * std::sin(1.5 * x(1)));
    };
    std::vector<double> err;
    for (int n : {1, 2, 4}) {
        const DgDiscretization d(annulus_mesh(n, 4 * n, 0.5, 1.0, 0.1, 4), 4, Regime::Neumann);
        HeatProblem pr;
        pr.initial = exact;
        pr.source = [&](const Vector2d& x) { return 6.25 * exact(x); };
        pr.neumann = grad;
        const VectorXd u = solve_deterministic_heat(d, pr, 1.0 / d.spectral_radius_estimate(), 0.05).u;
        err.push_back(l2_error(d, u, exact));
    }
    EXPECT_GE(std::log2(err[1] / err[2]), 4.5);
    EXPECT_LT(err[2], err[1]);
}

TEST(Heat, DirichletStrongKeepsBoundaryData)
{
    auto exact = [](const Vector2d& x) { return 1 + x(0) + 2 * x(1); };
    const DgDiscretization d(test::dirichlet_unit_square(3), 2, Regime::DirichletStrong);
    HeatProblem pr;
    pr.initial = [](const Vector2d&) { return 0.0; };
    pr.dirichlet = exact;
    const double dt = 1.0 / d.spectral_radius_estimate();
    const VectorXd u = solve_deterministic_heat(d, pr, dt, 2.0).u;
    const VectorXd target = interpolate(d, exact);
    for (Index b : d.boundary_indices()) {
        EXPECT_NEAR(u(b), target(b), 1e-14);
    }
    EXPECT_LE(l2_error(d, u, exact), 1e-6);
}

TEST(Heat, WeakDirichletLinearSteadyState)
{
    auto exact = [](const Vector2d& x) { return 1 + x(0) - x(1); };
    const DgDiscretization d(test::dirichlet_unit_square(2), 1, Regime::DirichletWeak);
    HeatProblem pr;
    pr.initial = exact;
    pr.dirichlet = exact;
    const double dt = 1.0 / d.spectral_radius_estimate();
    const VectorXd u = solve_deterministic_heat(d, pr, dt, 0.5).u;
    EXPECT_LE(l2_error(d, u, exact), 1e-10);
}

TEST(Heat, EnergyDecaysWithoutForcing)
{
    const DgDiscretization d(test::shipped_periodic_mesh(), 2, Regime::Periodic);
    HeatProblem pr;
    pr.initial = [](const Vector2d& x) { return std::sin(pi * x(0)) + 0.3 * std::cos(2 * pi * x(1)); };
    const double dt = 1.0 / d.spectral_radius_estimate();
    const HeatResult r = solve_deterministic_heat(d, pr, dt, 0.2, true);
    ASSERT_EQ(static_cast<long>(r.energy.size()), r.steps + 1);
    for (std::size_t k = 1; k < r.energy.size(); ++k) {
        EXPECT_LE(r.energy[k], r.energy[k - 1] * (1 + 1e-14));
    }
    EXPECT_LT(r.energy.back(), 0.5 * r.energy.front());
}

TEST(Heat, UnstableStepIsReported)
{
    const DgDiscretization d(test::periodic_square(4), 1, Regime::Periodic);
    HeatProblem pr;
    pr.initial = [](const Vector2d& x) { return std::sin(pi * x(0)) * std::sin(3 * pi * x(1)); };
    const double dt = 4.0 / d.spectral_radius_estimate();
    try {
        (void)solve_deterministic_heat(d, pr, dt, 200 * dt);
        FAIL() << "explicit Euler beyond its stability limit did not diverge";
    } catch (const DivergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
    }
}

TEST(Heat, InterpolationAndProjection)
{
    const DgDiscretization d(annulus_mesh(1, 8, 0.5, 1.0, 0.1, 3), 3, Regime::Neumann);
    auto cubic = [](const Vector2d& x) { return x(0) * x(0) * x(1) - 2 * x(1) + 0.5; };
    // On curved elements the mapped space misses the cubic; the projection is still the best fit.
    EXPECT_LE(l2_error(d, l2_project(d, cubic), cubic), l2_error(d, interpolate(d, cubic), cubic));
    const DgDiscretization flat(cartesian_mesh(2, 2), 3, Regime::Neumann);
    EXPECT_LE(l2_error(flat, interpolate(flat, cubic), cubic), 1e-13);
    EXPECT_LE(l2_error(flat, l2_project(flat, cubic), cubic), 1e-13);
}
