#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "sdgm/errors.hpp"
#include "sdgm/noise.hpp"
#include "sdgm/operators.hpp"
#include "sdgm/random.hpp"

namespace sdgm {

struct SimulationConfig {
    double dt = 1e-5;
    std::int64_t n_steps = 0;
    /// Leading fraction of the steps whose states are not observed.
    double burn_in_fraction = 0.1;
    std::uint64_t seed = 1;
    /// Deterministic forcing b in u^{n+1} = u^n + dt (L u^n + b) + f^n; empty means zero.
    Eigen::VectorXd forcing;
    /// Estimate |lambda_max(L)| by power iteration and warn if dt |lambda_max| >= 2.
    bool check_stability = true;

    [[nodiscard]] std::int64_t burn_in_steps() const
    {
        return static_cast<std::int64_t>(std::floor(burn_in_fraction * static_cast<double>(n_steps)));
    }
    [[nodiscard]] std::int64_t sample_count() const { return n_steps - burn_in_steps(); }
    void validate() const;
};

/// Total steps giving `samples` observed states after a burn-in fraction.
[[nodiscard]] std::int64_t steps_for_samples(std::int64_t samples, double burn_in_fraction);

/// Called with (step, state) for every state after the burn-in.
using Observer = std::function<void(std::int64_t, const Eigen::VectorXd&)>;

struct RunResult {
    Eigen::VectorXd state;
    std::int64_t steps = 0;
    std::int64_t observed = 0;
    double stability_product = 0;  // dt |lambda_max|, 0 when not checked
    bool stability_warning = false;
};

/// One Euler-Maruyama step u <- u + dt L u + f, with f already scaled by sqrt(dt).
template <typename Drift>
void em_step(Eigen::VectorXd& u, Drift&& apply_L, const Eigen::VectorXd& f, double dt, Eigen::VectorXd& work)
{
    apply_L(u, work);
    u += dt * work + f;
}

/// Euler-Maruyama chain for a generic drift u -> L u. `constrain` (if set)
/// is applied after every step. Throws DivergenceError naming the step on a
/// non-finite state; observer exceptions are rethrown with the step index.
template <typename Drift>
RunResult run_chain(const SimulationConfig& config, Eigen::VectorXd u, Drift&& apply_L, const NoiseSource& noise,
                    const Observer& observer, const std::function<void(Eigen::VectorXd&)>& constrain = {})
{
    config.validate();
    if (noise.num_dofs() != u.size()) {
        throw ArgumentError("run_chain: noise dimension " + std::to_string(noise.num_dofs()) +
                            " does not match state dimension " + std::to_string(u.size()));
    }
    if (config.forcing.size() != 0 && config.forcing.size() != u.size()) {
        throw ArgumentError("run_chain: forcing vector has the wrong length");
    }
    const GaussianStream stream(config.seed);
    const double sqrt_dt = std::sqrt(config.dt);
    const std::int64_t burn = config.burn_in_steps();
    RunResult result;
    Eigen::VectorXd f;
    Eigen::VectorXd work;
    for (std::int64_t step = 0; step < config.n_steps; ++step) {
        noise.draw(stream, static_cast<std::uint64_t>(step), f);
        f *= sqrt_dt;
        if (config.forcing.size() != 0) {
            f += config.dt * config.forcing;
        }
        em_step(u, apply_L, f, config.dt, work);
        if (constrain) {
            constrain(u);
        }
        if (!u.allFinite()) {
            throw DivergenceError("state became non-finite at step " + std::to_string(step + 1) +
                                  " (dt = " + std::to_string(config.dt) + ")");
        }
        if (step + 1 > burn && observer) {
            try {
                observer(step + 1, u);
            } catch (const std::exception& ex) {
                throw Error("observer failed at step " + std::to_string(step + 1) + ": " + ex.what());
            }
            ++result.observed;
        }
    }
    result.state = std::move(u);
    result.steps = config.n_steps;
    return result;
}

/// Stochastic diffusion on a DG discretization, starting from `initial`
/// (zero when empty). Strong Dirichlet states are re-masked after each step.
RunResult run(const SimulationConfig& config, const DgDiscretization& disc, const NoiseSource& noise,
              const Observer& observer, const Eigen::VectorXd& initial = {});

} // namespace sdgm
