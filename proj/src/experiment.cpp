#include "sdgm/experiment.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "sdgm/errors.hpp"
#include "sdgm/fdd.hpp"
#include "sdgm/random.hpp"
#include "sdgm/statistics.hpp"

namespace sdgm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

DgDiscretization make_discretization(const ExperimentConfig& config)
{
    return DgDiscretization(build_mesh(config.mesh), config.p, config.regime, config.ldg);
}

std::unique_ptr<NoiseSource> make_noise(const ExperimentConfig& config, const DgDiscretization& disc)
{
    if (!config.temporal_correction) {
        return std::make_unique<NoiseSampler>(make_sampler(disc, config.sampler, config.flux_scale));
    }
    if (config.sampler != SamplerKind::Fdd) {
        throw ConfigurationError("temporal_correction applies to the fdd sampler only");
    }
    if (disc.num_dofs() > kDenseDofLimit) {
        throw ConfigurationError("temporal_correction builds a dense covariance; mesh has " +
                                 std::to_string(disc.num_dofs()) + " DOFs (limit " +
                                 std::to_string(kDenseDofLimit) + ")");
    }
    const MatrixXd G =
        noise_covariance_temporal(disc.dense_generator(), disc.dense_subspace_target(), config.dt);
    return std::make_unique<DenseNoiseSampler>(G, "fdd_temporal");
}

SimulationConfig simulation_config(const ExperimentConfig& config)
{
    SimulationConfig sim;
    sim.dt = config.dt;
    sim.n_steps = config.n_steps;
    sim.burn_in_fraction = config.burn_in_fraction;
    sim.seed = config.seed;
    return sim;
}

namespace {

// Column j of the block-diagonal target, M^{-1} or C~.
VectorXd target_column(const DgDiscretization& disc, Index j)
{
    VectorXd e = VectorXd::Zero(disc.num_dofs());
    e(j) = disc.interior_mask()(j);
    VectorXd col = disc.mass_inverse() * e;
    return col.cwiseProduct(disc.interior_mask());
}

MatrixXd block_target(const DgDiscretization& disc)
{
    const VectorXd& mask = disc.interior_mask();
    return mask.asDiagonal() * disc.mass_inverse().dense() * mask.asDiagonal();
}

} // namespace

CovarianceStudy covariance_study(const ExperimentConfig& config, const DgDiscretization& disc,
                                 const NoiseSource& noise, const Observer& extra)
{
    const SimulationConfig sim = simulation_config(config);
    sim.validate();
    if (sim.sample_count() <= 0) {
        throw EmptyEstimateError("no samples to estimate from: n_steps = " + std::to_string(sim.n_steps) +
                                 " leaves 0 states after the burn-in");
    }
    const Index n = disc.num_dofs();
    for (Index r : config.rows) {
        if (r >= n) {
            throw ConfigurationError("output row " + std::to_string(r) + " is out of range (" + std::to_string(n) +
                                     " DOFs)");
        }
    }

    CovarianceStudy out;
    out.dense = n <= kDenseDofLimit;
    out.rows = config.rows;
    CovarianceAccumulator acc(n, out.dense, config.rows);
    out.run = run(sim, disc, noise, [&](std::int64_t step, const VectorXd& u) {
        acc.add(u);
        if (extra) {
            extra(step, u);
        }
    });
    out.samples = acc.count();
    out.variance = acc.second_moment_diagonal();

    if (out.dense) {
        out.covariance = acc.covariance();
        out.target = block_target(disc);
        out.rel_err = relative_frobenius_error(out.covariance, out.target);
        auto [mc, dev] = mass_identity_deviation(disc.mass(), out.covariance);
        out.mass_product = std::move(mc);
        out.mass_deviation = dev;
        for (Index r : config.rows) {
            out.row_correlations.push_back(out.mass_product.row(r).transpose());
        }
        return out;
    }

    if (config.rows.empty()) {
        VectorXd diag(n);
        for (Index j = 0; j < n; ++j) {
            diag(j) = target_column(disc, j)(j);
        }
        out.rel_err = relative_frobenius_error(out.variance, diag);
        return out;
    }
    const MatrixXd tracked = acc.tracked_row_moments();
    MatrixXd expected(tracked.rows(), n);
    for (Index k = 0; k < tracked.rows(); ++k) {
        expected.row(k) = target_column(disc, config.rows[k]).transpose();
    }
    out.rel_err = relative_frobenius_error(tracked, expected);
    return out;
}

std::vector<Check> verify_discretization(const DgDiscretization& disc)
{
    const Index n = disc.num_dofs();
    if (n > kDenseDofLimit) {
        throw ConfigurationError("verify needs dense matrices; mesh has " + std::to_string(n) + " DOFs (limit " +
                                 std::to_string(kDenseDofLimit) + ")");
    }
    std::vector<Check> checks;
    auto add = [&](std::string name, double value, double tol, bool pass) {
        checks.push_back({std::move(name), pass, value, tol});
    };

    const MatrixXd Lambda = disc.dense_noise_covariance();
    const NoiseSampler sampler = make_sampler(disc, SamplerKind::Fdd);
    const MatrixXd RRt = sampler.dense_covariance();
    const double factor_err = relative_frobenius_error(RRt, Lambda);
    add("factor_reproduces_covariance", factor_err, 1e-10, factor_err <= 1e-10);

    const MatrixXd D = disc.dense_divergence();
    const MatrixXd G = disc.dense_gradient();
    const double grad_err = (G + D.transpose()).cwiseAbs().maxCoeff() / D.cwiseAbs().maxCoeff();
    add("gradient_is_minus_divergence_transpose", grad_err, 1e-12, grad_err <= 1e-12);

    const MatrixXd A = disc.dense_laplacian();
    const double sym_err = (A - A.transpose()).norm() / A.norm();
    add("laplacian_symmetric", sym_err, 1e-12, sym_err <= 1e-12);

    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    const VectorXd& ev = eig.eigenvalues();
    const double rho = ev.cwiseAbs().maxCoeff();
    const double tol = 1e-10 * std::max(1.0, rho);
    add("laplacian_semidefinite", ev(n - 1), tol, ev(n - 1) <= tol);
    // Largest eigenvalue on the subspace where A must be definite: mean-zero
    // functions, or the interior block when boundary values are pinned.
    double restricted = ev(n - 1);
    std::string name = "laplacian_definite";
    if (mean_zero_regime(disc.regime())) {
        restricted = ev(n - 2);
        name = "laplacian_definite_mean_zero";
    } else if (disc.regime() == Regime::DirichletStrong) {
        std::vector<Index> interior;
        for (Index i = 0; i < n; ++i) {
            if (disc.interior_mask()(i) != 0) {
                interior.push_back(i);
            }
        }
        const MatrixXd Aii = A(interior, interior);
        restricted = Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (Aii + Aii.transpose()), Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
        name = "laplacian_definite_interior";
    }
    add(name, restricted, -tol, restricted < -tol);

    const MatrixXd L = disc.dense_generator();
    if (mean_zero_regime(disc.regime())) {
        const double kernel = (L * VectorXd::Ones(n)).cwiseAbs().maxCoeff() / std::max(1.0, L.cwiseAbs().maxCoeff());
        add("generator_annihilates_constants", kernel, 1e-10, kernel <= 1e-10);
    }

    const MatrixXd target = disc.dense_subspace_target();
    bool invertible = true;
    double round_trip = 0;
    try {
        round_trip = relative_frobenius_error(steady_state_covariance_spatial(disc.dense_deflated_generator(), Lambda),
                                              target);
    } catch (const SingularOperatorError&) {
        invertible = false;
        round_trip = std::numeric_limits<double>::infinity();
    }
    add("steady_state_round_trip", round_trip, 1e-8, invertible && round_trip <= 1e-8);

    const double lyap = lyapunov_residual(L, target, Lambda);
    add("lyapunov_residual", lyap, 1e-10, lyap <= 1e-10);

    const MatrixXd LC = L * target;
    const double lc_sym = (LC - LC.transpose()).norm() / std::max(LC.norm(), 1e-300);
    add("generator_times_target_symmetric", lc_sym, 1e-8, lc_sym <= 1e-8);

    if (disc.regime() == Regime::DirichletStrong) {
        double leak = 0;
        for (Index i : disc.boundary_indices()) {
            leak = std::max({leak, Lambda.row(i).cwiseAbs().maxCoeff(), Lambda.col(i).cwiseAbs().maxCoeff(),
                             RRt.row(i).cwiseAbs().maxCoeff(), RRt.col(i).cwiseAbs().maxCoeff(),
                             L.row(i).cwiseAbs().maxCoeff(), target.row(i).cwiseAbs().maxCoeff(),
                             target.col(i).cwiseAbs().maxCoeff()});
        }
        add("boundary_rows_and_columns_zero", leak, 0, leak == 0);
    }
    return checks;
}

namespace {

using Clock = std::chrono::steady_clock;

// Mean seconds per call of body(k); doubles the repetitions until the
// measurement spans at least `min_seconds`.
template <typename Body>
double time_per_call(std::int64_t& reps, double min_seconds, bool& warned, Body&& body)
{
    for (;;) {
        const auto t0 = Clock::now();
        for (std::int64_t k = 0; k < reps; ++k) {
            body(k);
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (secs >= min_seconds) {
            return secs / static_cast<double>(reps);
        }
        warned = true;
        reps *= 2;
    }
}

ScalingRow time_level(const ExperimentConfig& config, QuadMesh mesh, int p, int level, bool& warned)
{
    const DgDiscretization disc(std::move(mesh), p, config.regime, config.ldg);
    const NoiseSampler noise = make_sampler(disc, config.sampler, config.flux_scale);
    const GaussianStream stream(config.seed);
    const double sqrt_dt = std::sqrt(config.dt);
    constexpr double kMinSeconds = 0.05;

    VectorXd u = VectorXd::Zero(disc.num_dofs());
    VectorXd f;
    VectorXd work;
    auto drift = [&](const VectorXd& x, VectorXd& y) { disc.apply_generator(x, y); };

    ScalingRow row;
    row.level = level;
    row.p = p;
    row.elements = disc.num_elements();
    row.dofs = disc.num_dofs();
    row.repetitions = config.scaling_steps;
    row.seconds_per_step = time_per_call(row.repetitions, kMinSeconds, warned, [&](std::int64_t k) {
        noise.draw(stream, static_cast<std::uint64_t>(k), f);
        f *= sqrt_dt;
        em_step(u, drift, f, config.dt, work);
        disc.constrain(u);
    });
    std::int64_t draw_reps = config.scaling_steps;
    row.seconds_per_draw = time_per_call(draw_reps, kMinSeconds, warned, [&](std::int64_t k) {
        noise.draw(stream, static_cast<std::uint64_t>(k), f);
    });
    return row;
}

} // namespace

ScalingStudy scaling_study(const ExperimentConfig& config)
{
    if (config.scaling_levels.size() < 3) {
        throw ConfigurationError("scaling needs at least 3 refinement levels, got " +
                                 std::to_string(config.scaling_levels.size()));
    }
    if (config.mesh.source == MeshSpec::Source::File) {
        throw ConfigurationError("scaling needs a generated mesh (cartesian or annulus)");
    }
    ScalingStudy study;
    std::vector<double> elements;
    std::vector<double> step_times;
    std::vector<double> draw_times;
    for (int level : config.scaling_levels) {
        study.levels.push_back(time_level(config, build_mesh(config.mesh, level), config.p, level,
                                          study.timer_warning));
        elements.push_back(static_cast<double>(study.levels.back().elements));
        step_times.push_back(study.levels.back().seconds_per_step);
        draw_times.push_back(study.levels.back().seconds_per_draw);
    }
    study.step_slope = log_log_slope(elements, step_times);
    study.draw_slope = log_log_slope(elements, draw_times);
    for (int p : config.scaling_degrees) {
        study.degrees.push_back(time_level(config, build_mesh(config.mesh), p, 0, study.timer_warning));
    }
    return study;
}

} // namespace sdgm
