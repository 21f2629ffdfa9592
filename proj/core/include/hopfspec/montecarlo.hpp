#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hopfspec/params.hpp"

namespace hopfspec::montecarlo {

/// Counter-based RNG (Philox4x32-10). Each (seed, stream) pair is an
/// independent sequence addressed by a 64-bit counter, so trajectory i is
/// reproducible regardless of scheduling.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    /// Next uniform double in (0, 1).
    double uniform();

    /// Next standard normal pair (Marsaglia polar method).
    std::array<double, 2> normal_pair();

    /// Raw 32-bit output, for tests.
    std::uint32_t next_u32();

private:
    void refill();

    std::uint32_t key_[2];
    std::uint32_t counter_[4];
    std::uint32_t block_[4];
    int block_pos_ = 4;
};

struct InitialCondition {
    enum class Kind { fixed, radius_uniform_angle };
    Kind kind = Kind::fixed;
    double x = 0.0;
    double y = 0.0;
    double r0 = 1.0;  // used by radius_uniform_angle
};

struct SimulationConfig {
    double dt = 1e-3;
    std::int64_t n_steps = 1000;
    int n_trajectories = 1;
    std::uint64_t seed = 0;
    InitialCondition initial;
    std::int64_t record_stride = 1;

    void validate(const ModelParams& params) const;
};

struct Trajectory {
    std::vector<double> t, x, y;
};

/// Euler-Maruyama integration of the Cartesian stochastic Hopf equation for
/// one trajectory (stream 0 of the seed). Bitwise reproducible per seed.
/// Throws NumericalError with the step index if the state becomes non-finite.
Trajectory simulate(const ModelParams& params, const SimulationConfig& config);

struct MomentPoint {
    double t = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Ensemble mean of r_t^2 over n_traj trajectories started at radius r0 with
/// uniform random angle, recorded at the given times.
std::vector<MomentPoint> ensemble_second_moment(const ModelParams& params, double r0,
                                                const std::vector<double>& t_grid, int n_traj,
                                                std::uint64_t seed, double dt);

struct BoundReport {
    bool passed = false;
    double max_violation_se = 0.0;  // largest (E[r^2] - bound)/SE over the horizon
    double c = 0.0;                 // exponential rate of the bound
    double d = 0.0;                 // ultimate bound constant
    double fitted_decay_rate = 0.0; // exponential rate of approach to equilibrium
    std::vector<MomentPoint> moments;
};

/// Monte Carlo check of the ultimate bound E[r_t^2] <= r0^2 exp(-c t) + d:
/// c = -2 delta, d = eps^2/|delta| below the bifurcation, and
/// c = 2 sqrt(4 eps^2 + delta^2), d = (delta + sqrt(4 eps^2 + delta^2))/2 at
/// and above it. Passes when no violation exceeds 3 standard errors.
BoundReport check_ultimate_bound(const ModelParams& params, double r0, double horizon,
                                 int n_traj, std::uint64_t seed, double dt = 1e-3);

struct CorrelationPoint {
    double lag = 0.0;
    double value = 0.0;
    double standard_error = 0.0;  // batch-means estimate; 0 when too few batches
};

/// Mean-removed lagged time-average correlation estimator between two equal
/// length stationary series. Lag 0 equals the sample covariance.
std::vector<CorrelationPoint> empirical_correlation(const std::vector<double>& series_f,
                                                    const std::vector<double>& series_g,
                                                    double dt, std::int64_t max_lag);

/// Default burn-in for stationary statistics: 10 / min(|delta|, eps^2) time units.
double default_burn_in(const ModelParams& params);

struct PhaseVariancePoint {
    double t = 0.0;
    double variance = 0.0;
};

/// Ensemble variance of the unwrapped asymptotic phase under radially forced
/// dynamics dX = V0 dt + sigma e_r o dW (Stratonovich, Euler-Heun step),
/// started on the limit cycle. Requires delta > 0.
std::vector<PhaseVariancePoint> radial_forcing_phase_variance(
    const ModelParams& params, double sigma, const std::vector<double>& t_grid, int n_traj,
    std::uint64_t seed, double dt);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_ensemble_csv(const std::vector<MomentPoint>& points, const std::string& path);

} // namespace hopfspec::montecarlo
