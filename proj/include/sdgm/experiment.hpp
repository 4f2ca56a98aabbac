#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sdgm/config.hpp"
#include "sdgm/integrator.hpp"
#include "sdgm/noise.hpp"
#include "sdgm/operators.hpp"

namespace sdgm {

/// Above this many DOFs only the diagonal and the requested rows of the
/// covariance are accumulated, and dense oracles are refused.
inline constexpr Index kDenseDofLimit = 4000;

[[nodiscard]] DgDiscretization make_discretization(const ExperimentConfig& config);

/// The configured sampler. With temporal_correction the FDD noise is the
/// dense time-step corrected covariance (small meshes only).
[[nodiscard]] std::unique_ptr<NoiseSource> make_noise(const ExperimentConfig& config, const DgDiscretization& disc);

[[nodiscard]] SimulationConfig simulation_config(const ExperimentConfig& config);

struct CovarianceStudy {
    std::int64_t samples = 0;
    bool dense = true;
    Eigen::MatrixXd covariance;     // empty unless dense
    Eigen::MatrixXd target;         // M^{-1} or C~; empty unless dense
    Eigen::MatrixXd mass_product;   // M C; empty unless dense
    double rel_err = 0;             // over the full matrix, or over the tracked rows
    double mass_deviation = 0;      // ||M C - I||_F / sqrt(N); dense only
    std::vector<Index> rows;
    std::vector<Eigen::VectorXd> row_correlations;  // row of M C per tracked index
    Eigen::VectorXd variance;       // diagonal second moment
    RunResult run;
};

/// Runs the chain and compares the stationary second moment with the
/// target covariance. Throws EmptyEstimateError when no state survives the
/// burn-in.
[[nodiscard]] CovarianceStudy covariance_study(const ExperimentConfig& config, const DgDiscretization& disc,
                                               const NoiseSource& noise, const Observer& extra = {});

struct Check {
    std::string name;
    bool pass = false;
    double value = 0;
    double tolerance = 0;
};

/// Dense identity suite: sampler factor, G = -D^T, symmetry and
/// definiteness of A, constants in the kernel of L, the steady-state round
/// trip and the strong Dirichlet boundary masking.
[[nodiscard]] std::vector<Check> verify_discretization(const DgDiscretization& disc);

struct ScalingRow {
    int level = 0;
    int p = 0;
    Index elements = 0;
    Index dofs = 0;
    double seconds_per_step = 0;
    double seconds_per_draw = 0;
    std::int64_t repetitions = 0;
};

struct ScalingStudy {
    std::vector<ScalingRow> levels;
    std::vector<ScalingRow> degrees;
    double step_slope = 0;
    double draw_slope = 0;
    bool timer_warning = false;
};

/// Times Euler-Maruyama steps and bare noise draws on each refinement level
/// (nx = ny = level) and fits log-log slopes against the element count.
/// Needs at least three levels.
[[nodiscard]] ScalingStudy scaling_study(const ExperimentConfig& config);

} // namespace sdgm
