#include "hopfspec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hopfspec/detail/format.hpp"
#include "hopfspec/errors.hpp"
#include "hopfspec/model.hpp"

namespace hopfspec::montecarlo {

namespace {

constexpr double two_pi = 2.0 * M_PI;

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    const std::uint64_t p0 = 0xD2511F53ull * c[0];
    const std::uint64_t p1 = 0xCD9E8D57ull * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t out0 = hi1 ^ c[1] ^ k[0];
    const std::uint32_t out1 = lo1;
    const std::uint32_t out2 = hi0 ^ c[3] ^ k[1];
    const std::uint32_t out3 = lo0;
    c[0] = out0;
    c[1] = out1;
    c[2] = out2;
    c[3] = out3;
}

// Equilibrium scale of E[r^2], valid for every delta (exact for the bound ODE).
double equilibrium_r2(const ModelParams& p) {
    const double root = std::sqrt(4.0 * p.epsilon * p.epsilon + p.delta * p.delta);
    return 0.5 * (p.delta + root);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    counter_[0] = 0;
    counter_[1] = 0;
    counter_[2] = static_cast<std::uint32_t>(stream);
    counter_[3] = static_cast<std::uint32_t>(stream >> 32);
}

void CounterRng::refill() {
    std::uint32_t c[4] = {counter_[0], counter_[1], counter_[2], counter_[3]};
    std::uint32_t k[2] = {key_[0], key_[1]};
    for (int round = 0; round < 10; ++round) {
        philox_round(c, k);
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
    }
    block_[0] = c[0];
    block_[1] = c[1];
    block_[2] = c[2];
    block_[3] = c[3];
    if (++counter_[0] == 0) ++counter_[1];
    block_pos_ = 0;
}

std::uint32_t CounterRng::next_u32() {
    if (block_pos_ >= 4) refill();
    return block_[block_pos_++];
}

double CounterRng::uniform() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    const std::uint64_t bits = (hi << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

std::array<double, 2> CounterRng::normal_pair() {
    // Marsaglia polar method; the per-stream rejection loop is deterministic.
    while (true) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double m = std::sqrt(-2.0 * std::log(s) / s);
            return {u * m, v * m};
        }
    }
}

void SimulationConfig::validate(const ModelParams& params) const {
    params.validate();
    if (!(dt > 0.0)) throw ConfigError("SimulationConfig: dt must be positive");
    if (n_steps < 1) throw ConfigError("SimulationConfig: n_steps must be >= 1");
    if (n_trajectories < 1) throw ConfigError("SimulationConfig: n_trajectories must be >= 1");
    if (record_stride < 1) throw ConfigError("SimulationConfig: record_stride must be >= 1");
    double r2_init = initial.kind == InitialCondition::Kind::fixed
                         ? initial.x * initial.x + initial.y * initial.y
                         : initial.r0 * initial.r0;
    const double r2_max = std::max(r2_init, 3.0 * equilibrium_r2(params));
    const double scale = std::max(std::abs(params.delta), r2_max);
    if (scale > 0.0 && dt > 0.1 / scale) {
        throw ConfigError("SimulationConfig: dt exceeds the stability heuristic 0.1/max(|delta|, r_max^2)");
    }
}

namespace {

struct State {
    double x, y;
};

State initial_state(const InitialCondition& ic, CounterRng& rng) {
    if (ic.kind == InitialCondition::Kind::fixed) {
        return {ic.x, ic.y};
    }
    const double angle = two_pi * rng.uniform();
    return {ic.r0 * std::cos(angle), ic.r0 * std::sin(angle)};
}

template <typename Recorder>
void run_em_trajectory(const ModelParams& params, const SimulationConfig& config,
                       std::uint64_t stream, Recorder&& record) {
    CounterRng rng(config.seed, stream);
    State s = initial_state(config.initial, rng);
    const double noise = params.epsilon * std::sqrt(config.dt);
    record(0, s.x, s.y);
    for (std::int64_t step = 1; step <= config.n_steps; ++step) {
        const auto f = model::drift_cartesian(params, s.x, s.y);
        const auto xi = rng.normal_pair();
        s.x += f[0] * config.dt + noise * xi[0];
        s.y += f[1] * config.dt + noise * xi[1];
        if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
            throw NumericalError("simulate: non-finite state at step " +
                                 std::to_string(step));
        }
        record(step, s.x, s.y);
    }
}

} // namespace

Trajectory simulate(const ModelParams& params, const SimulationConfig& config) {
    config.validate(params);
    Trajectory traj;
    const std::int64_t n_records = config.n_steps / config.record_stride + 1;
    traj.t.reserve(n_records);
    traj.x.reserve(n_records);
    traj.y.reserve(n_records);
    run_em_trajectory(params, config, 0,
                      [&](std::int64_t step, double x, double y) {
                          if (step % config.record_stride == 0) {
                              traj.t.push_back(step * config.dt);
                              traj.x.push_back(x);
                              traj.y.push_back(y);
                          }
                      });
    return traj;
}

std::vector<MomentPoint> ensemble_second_moment(const ModelParams& params, double r0,
                                                const std::vector<double>& t_grid, int n_traj,
                                                std::uint64_t seed, double dt) {
    if (n_traj < 100) {
        throw ConfigError("ensemble_second_moment: n_traj must be >= 100");
    }
    if (t_grid.empty()) throw ConfigError("ensemble_second_moment: empty time grid");

    SimulationConfig config;
    config.dt = dt;
    config.seed = seed;
    config.initial.kind = InitialCondition::Kind::radius_uniform_angle;
    config.initial.r0 = r0;
    config.n_steps = static_cast<std::int64_t>(std::ceil(t_grid.back() / dt));
    config.validate(params);

    std::vector<std::int64_t> record_steps(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        record_steps[i] = std::llround(t_grid[i] / dt);
    }

    std::vector<double> mean(t_grid.size(), 0.0), m2(t_grid.size(), 0.0);
    for (int traj = 0; traj < n_traj; ++traj) {
        std::size_t next = 0;
        run_em_trajectory(params, config, static_cast<std::uint64_t>(traj),
                          [&](std::int64_t step, double x, double y) {
                              while (next < record_steps.size() &&
                                     record_steps[next] == step) {
                                  const double r2 = x * x + y * y;
                                  const double d = r2 - mean[next];
                                  mean[next] += d / (traj + 1);
                                  m2[next] += d * (r2 - mean[next]);
                                  ++next;
                              }
                          });
    }

    std::vector<MomentPoint> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        out[i].t = record_steps[i] * dt;
        out[i].mean = mean[i];
        out[i].standard_error = std::sqrt(m2[i] / (n_traj - 1.0) / n_traj);
    }
    return out;
}

BoundReport check_ultimate_bound(const ModelParams& params, double r0, double horizon,
                                 int n_traj, std::uint64_t seed, double dt) {
    params.validate();
    if (params.epsilon <= 0.0) {
        throw ConfigError("check_ultimate_bound: requires epsilon > 0");
    }
    BoundReport report;
    if (params.delta < 0.0) {
        report.c = -2.0 * params.delta;
        report.d = params.epsilon * params.epsilon / (-params.delta);
    } else {
        const double root =
            std::sqrt(4.0 * params.epsilon * params.epsilon + params.delta * params.delta);
        report.c = 2.0 * root;
        report.d = 0.5 * (params.delta + root);
    }

    constexpr int n_points = 201;
    std::vector<double> t_grid(n_points);
    for (int i = 0; i < n_points; ++i) t_grid[i] = horizon * i / (n_points - 1);
    report.moments = ensemble_second_moment(params, r0, t_grid, n_traj, seed, dt);

    double max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& pt : report.moments) {
        const double bound = r0 * r0 * std::exp(-report.c * pt.t) + report.d;
        if (pt.standard_error > 0.0) {
            max_violation = std::max(max_violation, (pt.mean - bound) / pt.standard_error);
        } else if (pt.mean > bound) {
            max_violation = std::numeric_limits<double>::infinity();
        }
    }
    report.max_violation_se = max_violation;
    report.passed = max_violation <= 3.0;

    // Exponential rate of the approach to equilibrium, fitted on the window
    // where the gap has decayed to between 60% and 10% of its initial value.
    const std::size_t tail_begin = report.moments.size() * 3 / 4;
    double equil = 0.0;
    for (std::size_t i = tail_begin; i < report.moments.size(); ++i) {
        equil += report.moments[i].mean;
    }
    equil /= static_cast<double>(report.moments.size() - tail_begin);
    const double gap0 = std::abs(report.moments.front().mean - equil);
    std::vector<double> ts, logs;
    for (const auto& pt : report.moments) {
        const double gap = std::abs(pt.mean - equil);
        if (gap <= 0.6 * gap0 && gap >= 0.1 * gap0 && gap > 0.0) {
            ts.push_back(pt.t);
            logs.push_back(std::log(gap));
        }
    }
    if (ts.size() >= 3) {
        const double n = static_cast<double>(ts.size());
        const double sx = std::accumulate(ts.begin(), ts.end(), 0.0);
        const double sy = std::accumulate(logs.begin(), logs.end(), 0.0);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            sxx += ts[i] * ts[i];
            sxy += ts[i] * logs[i];
        }
        const double denom = n * sxx - sx * sx;
        if (denom > 0.0) report.fitted_decay_rate = -(n * sxy - sx * sy) / denom;
    }
    return report;
}

std::vector<CorrelationPoint> empirical_correlation(const std::vector<double>& series_f,
                                                    const std::vector<double>& series_g,
                                                    double dt, std::int64_t max_lag) {
    if (series_f.size() != series_g.size()) {
        throw DimensionError("empirical_correlation: series lengths differ");
    }
    const std::int64_t n = static_cast<std::int64_t>(series_f.size());
    if (max_lag >= n) {
        throw ConfigError("empirical_correlation: max_lag must be smaller than the series");
    }
    const double mean_f = std::accumulate(series_f.begin(), series_f.end(), 0.0) / n;
    const double mean_g = std::accumulate(series_g.begin(), series_g.end(), 0.0) / n;

    std::vector<CorrelationPoint> out(static_cast<std::size_t>(max_lag) + 1);
    for (std::int64_t lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::int64_t i = 0; i + lag < n; ++i) {
            acc += (series_f[i] - mean_f) * (series_g[i + lag] - mean_g);
        }
        out[lag].lag = lag * dt;
        out[lag].value = acc / static_cast<double>(n - lag);
    }

    // Batch-means standard errors: the lag-profile recomputed on contiguous
    // batches, spread across batches over sqrt(B).
    const std::int64_t batch_len = std::max<std::int64_t>(4 * (max_lag + 1), n / 32);
    const std::int64_t n_batches = n / batch_len;
    if (n_batches >= 4) {
        for (std::int64_t lag = 0; lag <= max_lag; ++lag) {
            double bm = 0.0, bs = 0.0;
            for (std::int64_t b = 0; b < n_batches; ++b) {
                const std::int64_t begin = b * batch_len;
                double acc = 0.0;
                std::int64_t count = 0;
                for (std::int64_t i = begin; i + lag < begin + batch_len; ++i) {
                    acc += (series_f[i] - mean_f) * (series_g[i + lag] - mean_g);
                    ++count;
                }
                const double val = acc / static_cast<double>(count);
                const double d = val - bm;
                bm += d / (b + 1);
                bs += d * (val - bm);
            }
            out[lag].standard_error =
                std::sqrt(bs / (n_batches - 1.0) / static_cast<double>(n_batches));
        }
    }
    return out;
}

double default_burn_in(const ModelParams& params) {
    const double e2 = params.epsilon * params.epsilon;
    if (e2 <= 0.0) throw ConfigError("default_burn_in: requires epsilon > 0");
    const double denom = params.delta != 0.0 ? std::min(std::abs(params.delta), e2) : e2;
    return 10.0 / denom;
}

std::vector<PhaseVariancePoint> radial_forcing_phase_variance(
    const ModelParams& params, double sigma, const std::vector<double>& t_grid, int n_traj,
    std::uint64_t seed, double dt) {
    params.validate();
    if (params.delta <= 0.0) {
        throw DomainError("radial_forcing_phase_variance: requires delta > 0");
    }
    if (t_grid.empty() || n_traj < 2) {
        throw ConfigError("radial_forcing_phase_variance: need a time grid and >= 2 trajectories");
    }
    const double sqrt_delta = std::sqrt(params.delta);
    const std::int64_t n_steps = static_cast<std::int64_t>(std::ceil(t_grid.back() / dt));
    std::vector<std::int64_t> record_steps(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        record_steps[i] = std::llround(t_grid[i] / dt);
    }

    const auto radial_unit = [](double x, double y) -> std::array<double, 2> {
        const double r = std::hypot(x, y);
        return {x / r, y / r};
    };

    std::vector<double> mean(t_grid.size(), 0.0), m2(t_grid.size(), 0.0);
    for (int traj = 0; traj < n_traj; ++traj) {
        CounterRng rng(seed, static_cast<std::uint64_t>(traj));
        double x = sqrt_delta, y = 0.0;
        double theta_cont = 0.0, theta_prev = 0.0;
        std::size_t next = 0;

        const auto maybe_record = [&](std::int64_t step) {
            while (next < record_steps.size() && record_steps[next] == step) {
                const double r = std::hypot(x, y);
                const double phi =
                    theta_cont - params.beta * std::log(r / sqrt_delta);
                const double d = phi - mean[next];
                mean[next] += d / (traj + 1);
                m2[next] += d * (phi - mean[next]);
                ++next;
            }
        };
        maybe_record(0);

        for (std::int64_t step = 1; step <= n_steps; ++step) {
            const auto f = model::drift_cartesian(params, x, y);
            const auto v1 = radial_unit(x, y);
            const double dw = std::sqrt(dt) * rng.normal_pair()[0];
            // Euler-Heun predictor-corrector (Stratonovich).
            const double xp = x + f[0] * dt + sigma * v1[0] * dw;
            const double yp = y + f[1] * dt + sigma * v1[1] * dw;
            const auto fp = model::drift_cartesian(params, xp, yp);
            const auto v1p = radial_unit(xp, yp);
            x += 0.5 * (f[0] + fp[0]) * dt + 0.5 * sigma * (v1[0] + v1p[0]) * dw;
            y += 0.5 * (f[1] + fp[1]) * dt + 0.5 * sigma * (v1[1] + v1p[1]) * dw;
            if (!std::isfinite(x) || !std::isfinite(y)) {
                throw NumericalError("radial_forcing_phase_variance: non-finite state");
            }
            const double theta_raw = std::atan2(y, x);
            double jump = theta_raw - theta_prev;
            if (jump > M_PI) jump -= two_pi;
            if (jump < -M_PI) jump += two_pi;
            theta_cont += jump;
            theta_prev = theta_raw;
            maybe_record(step);
        }
    }

    std::vector<PhaseVariancePoint> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        out[i].t = record_steps[i] * dt;
        out[i].variance = m2[i] / (n_traj - 1.0);
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_trajectory_csv: cannot open " + path);
    out << "t,x,y\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        out << detail::g17(traj.t[i]) << ',' << detail::g17(traj.x[i]) << ','
            << detail::g17(traj.y[i]) << '\n';
    }
}

void write_ensemble_csv(const std::vector<MomentPoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_ensemble_csv: cannot open " + path);
    out << "t,mean,stderr\n";
    for (const auto& p : points) {
        out << detail::g17(p.t) << ',' << detail::g17(p.mean) << ','
            << detail::g17(p.standard_error) << '\n';
    }
}

} // namespace hopfspec::montecarlo
