#include "sdgm/integrator.hpp"

#include <iostream>

namespace sdgm {

void SimulationConfig::validate() const
{
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw ConfigurationError("dt must be positive and finite");
    }
    if (n_steps < 0) {
        throw ConfigurationError("n_steps must be >= 0");
    }
    if (!(burn_in_fraction >= 0 && burn_in_fraction < 1)) {
        throw ConfigurationError("burn_in_fraction must lie in [0, 1)");
    }
}

std::int64_t steps_for_samples(std::int64_t samples, double burn_in_fraction)
{
    if (samples < 0 || !(burn_in_fraction >= 0 && burn_in_fraction < 1)) {
        throw ArgumentError("steps_for_samples: need samples >= 0 and burn-in fraction in [0, 1)");
    }
    auto samples_after = [burn_in_fraction](std::int64_t steps) {
        SimulationConfig c;
        c.n_steps = steps;
        c.burn_in_fraction = burn_in_fraction;
        return c.sample_count();
    };
    auto steps = static_cast<std::int64_t>(std::ceil(static_cast<double>(samples) / (1 - burn_in_fraction)));
    // floor/ceil rounding can leave the estimate one off either way.
    while (samples_after(steps) < samples) {
        ++steps;
    }
    while (steps > 0 && samples_after(steps - 1) >= samples) {
        --steps;
    }
    return steps;
}

RunResult run(const SimulationConfig& config, const DgDiscretization& disc, const NoiseSource& noise,
              const Observer& observer, const Eigen::VectorXd& initial)
{
    config.validate();
    double product = 0;
    if (config.check_stability && config.n_steps > 0) {
        product = config.dt * disc.spectral_radius_estimate();
        if (product >= 2) {
            std::cerr << "warning: dt * |lambda_max(L)| = " << product
                      << " >= 2; explicit Euler-Maruyama is unstable at this time step\n";
        }
    }
    Eigen::VectorXd u = initial.size() == 0 ? Eigen::VectorXd::Zero(disc.num_dofs()) : initial;
    if (u.size() != disc.num_dofs()) {
        throw ArgumentError("run: initial state has the wrong length");
    }
    std::function<void(Eigen::VectorXd&)> constrain;
    if (disc.regime() == Regime::DirichletStrong) {
        disc.constrain(u);
        constrain = [&disc](Eigen::VectorXd& v) { disc.constrain(v); };
    }
    RunResult result = run_chain(
        config, std::move(u), [&disc](const Eigen::VectorXd& x, Eigen::VectorXd& y) { disc.apply_generator(x, y); },
        noise, observer, constrain);
    result.stability_product = product;
    result.stability_warning = product >= 2;
    return result;
}

} // namespace sdgm
