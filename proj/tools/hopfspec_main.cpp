// Command-line front end: spectra, small-noise formulas, simulation,
// correlation/power reconstruction, parameter sweeps, geometry reports.

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"

#include "hopfspec/analytic.hpp"
#include "hopfspec/eigensolver.hpp"
#include "hopfspec/errors.hpp"
#include "hopfspec/fokker_planck.hpp"
#include "hopfspec/grid.hpp"
#include "hopfspec/model.hpp"
#include "hopfspec/montecarlo.hpp"
#include "hopfspec/spectral.hpp"
#include "hopfspec/sweeps.hpp"
#include "hopfspec/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hopfspec;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_partial = 2;

struct CommonOptions {
    std::string output_dir = ".";
    std::string config_path;
    CLI::Option* opt_output_dir = nullptr;
};

void attach_common(CLI::App* cmd, CommonOptions& common) {
    common.opt_output_dir =
        cmd->add_option("--output-dir", common.output_dir, "Directory for output files");
    cmd->add_option("--config", common.config_path,
                    "JSON config file; flags take precedence over its keys");
}

json load_config(const CommonOptions& common) {
    if (common.config_path.empty()) return json::object();
    std::ifstream in(common.config_path);
    if (!in) throw ConfigError("cannot open config file " + common.config_path);
    json j;
    in >> j;
    return j;
}

// Config precedence: a JSON key fills any option the user did not pass.
template <typename T>
void from_config(const json& j, const CLI::Option* opt, const char* key, T& var) {
    if (opt != nullptr && opt->count() == 0 && j.contains(key)) {
        var = j.at(key).get<T>();
    }
}

struct ParamFlags {
    ModelParams params;
    CLI::Option* o_delta = nullptr;
    CLI::Option* o_gamma = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_epsilon = nullptr;

    void attach(CLI::App* cmd) {
        o_delta = cmd->add_option("--delta", params.delta, "Bifurcation parameter");
        o_gamma = cmd->add_option("--gamma", params.gamma, "Base angular frequency");
        o_beta = cmd->add_option("--beta", params.beta, "Twist factor");
        o_epsilon = cmd->add_option("--epsilon", params.epsilon, "Noise level");
    }
    void finish(const json& j) {
        from_config(j, o_delta, "delta", params.delta);
        from_config(j, o_gamma, "gamma", params.gamma);
        from_config(j, o_beta, "beta", params.beta);
        from_config(j, o_epsilon, "epsilon", params.epsilon);
        params.validate();
    }
    void record(cli::RunManifest& manifest) const {
        manifest.parameter("delta", params.delta);
        manifest.parameter("gamma", params.gamma);
        manifest.parameter("beta", params.beta);
        manifest.parameter("epsilon", params.epsilon);
    }
};

struct GridFlags {
    int nx = 200;
    int ny = 200;
    double width_multiplier = 5.0;
    double half_width = 0.0;  // > 0 overrides the sigma-scaled extent
    CLI::Option* o_nx = nullptr;
    CLI::Option* o_ny = nullptr;
    CLI::Option* o_mult = nullptr;
    CLI::Option* o_half = nullptr;

    void attach(CLI::App* cmd) {
        o_nx = cmd->add_option("--nx", nx, "Cells along x");
        o_ny = cmd->add_option("--ny", ny, "Cells along y");
        o_mult = cmd->add_option("--width-multiplier", width_multiplier,
                                 "Half width in units of sigma_hat");
        o_half = cmd->add_option("--half-width", half_width,
                                 "Explicit half width (overrides the multiplier)");
    }
    void finish(const json& j) {
        from_config(j, o_nx, "nx", nx);
        from_config(j, o_ny, "ny", ny);
        from_config(j, o_mult, "width_multiplier", width_multiplier);
        from_config(j, o_half, "half_width", half_width);
    }
    Grid2D build(const ModelParams& params) const {
        if (half_width > 0.0) return build_grid_with_half_width(nx, ny, half_width);
        return build_grid(params, nx, ny, width_multiplier);
    }
    void record(cli::RunManifest& manifest, const Grid2D& grid) const {
        manifest.parameter("nx", grid.nx());
        manifest.parameter("ny", grid.ny());
        manifest.parameter("half_width", grid.half_width());
    }
};

struct SolverFlags {
    std::string mode = "plain";
    eigensolver::ArnoldiOptions opts;
    CLI::Option* o_mode = nullptr;
    CLI::Option* o_tol = nullptr;
    CLI::Option* o_restarts = nullptr;
    CLI::Option* o_krylov = nullptr;
    CLI::Option* o_shift = nullptr;

    void attach(CLI::App* cmd) {
        o_mode = cmd->add_option("--solver", mode, "Eigensolver mode")
                     ->check(CLI::IsMember({"plain", "shift-invert"}));
        o_tol = cmd->add_option("--tol", opts.tol, "Ritz residual tolerance");
        o_restarts = cmd->add_option("--max-restarts", opts.max_restarts, "Restart budget");
        o_krylov = cmd->add_option("--krylov", opts.m, "Krylov subspace dimension");
        o_shift = cmd->add_option("--shift", opts.shift, "Shift for shift-invert mode");
    }
    void finish(const json& j) {
        from_config(j, o_mode, "solver", mode);
        from_config(j, o_tol, "tol", opts.tol);
        from_config(j, o_restarts, "max_restarts", opts.max_restarts);
        from_config(j, o_krylov, "krylov", opts.m);
        from_config(j, o_shift, "shift", opts.shift);
        opts.selection = mode == "plain"
                             ? eigensolver::Selection::largest_real_part
                             : eigensolver::Selection::largest_magnitude_of_shift_inverted;
    }
};

fs::path prepare_output_dir(const CommonOptions& common) {
    fs::path dir(common.output_dir);
    fs::create_directories(dir);
    return dir;
}

int default_threads() {
    if (const char* env = std::getenv("HOPFSPEC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

GridField observable_on_grid(const Grid2D& grid, const std::string& name) {
    return spectral::monomial_observable(grid, name);
}

double observable_on_sample(const std::string& name, double x, double y) {
    if (name == "x") return x;
    if (name == "y") return y;
    if (name == "x2") return x * x;
    if (name == "x3") return x * x * x;
    if (name == "r2") return x * x + y * y;
    throw ConfigError("unknown observable '" + name + "'");
}

// ---------------------------------------------------------------- spectrum

int run_spectrum(const CommonOptions& common, ParamFlags& pf, GridFlags& gf, SolverFlags& sf,
                 int k) {
    const json j = load_config(common);
    pf.finish(j);
    gf.finish(j);
    sf.finish(j);
    if (pf.params.epsilon <= 0.0) {
        throw ConfigError("epsilon = 0 gives a degenerate diffusion; no spectrum");
    }
    if (k < 2) throw ConfigError("k must be >= 2");

    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("spectrum", version_string);
    pf.record(manifest);
    manifest.parameter("k", k);
    manifest.parameter("solver", sf.mode);

    const Grid2D grid = gf.build(pf.params);
    gf.record(manifest, grid);
    const auto gen = fokker_planck::assemble(pf.params, grid);
    const auto spectrum = eigensolver::solve_mixing_spectrum(gen, k, sf.opts);

    const fs::path spectrum_csv = dir / "spectrum.csv";
    eigensolver::write_spectrum_csv(spectrum, spectrum_csv.string());
    manifest.output(spectrum_csv);

    const fs::path density_csv = dir / "invariant_density.csv";
    write_field_csv(spectrum.invariant_density, density_csv.string());
    manifest.output(density_csv);

    for (std::size_t jdx = 0; jdx < spectrum.pairs.size(); ++jdx) {
        char name[64];
        std::snprintf(name, sizeof(name), "eigenfunction_%02zu.csv", jdx);
        const fs::path path = dir / name;
        write_field_csv(spectrum.pairs[jdx].psi, path.string());
        manifest.output(path);
    }
    manifest.parameter("clamped_cells", spectrum.clamped_cells);
    manifest.parameter("positivity_warning", spectrum.positivity_warning);
    manifest.parameter("fully_converged", spectrum.fully_converged);
    manifest.write(dir / "manifest.json");

    if (!spectrum.fully_converged) {
        std::cerr << "spectrum: partial convergence, see manifest\n";
        return exit_partial;
    }
    return exit_ok;
}

// ---------------------------------------------------------------- analytic

int run_analytic(const CommonOptions& common, ParamFlags& pf, int l_max, int n_max) {
    const json j = load_config(common);
    pf.finish(j);
    if (pf.params.delta == 0.0) {
        throw ConfigError("no small-noise expansion at criticality (delta = 0)");
    }
    if (pf.params.epsilon <= 0.0) {
        throw ConfigError("small-noise spectra require epsilon > 0");
    }
    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("analytic", version_string);
    pf.record(manifest);
    manifest.parameter("l_max", l_max);
    manifest.parameter("n_max", n_max);

    const auto spectrum = pf.params.delta < 0.0
                              ? analytic::subcritical_spectrum(pf.params, l_max, n_max)
                              : analytic::supercritical_spectrum(pf.params, l_max, n_max);
    const fs::path csv = dir / "analytic.csv";
    analytic::write_analytic_csv(spectrum, csv.string());
    manifest.output(csv);
    manifest.parameter("decorrelation_time", spectrum.decorrelation_time);
    manifest.write(dir / "manifest.json");
    return exit_ok;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const CommonOptions& common, ParamFlags& pf,
                 montecarlo::SimulationConfig& cfg, double r0, CLI::Option* o_r0) {
    const json j = load_config(common);
    pf.finish(j);
    if (o_r0->count() > 0 || j.contains("r0")) {
        if (o_r0->count() == 0) r0 = j.at("r0").get<double>();
        cfg.initial.kind = montecarlo::InitialCondition::Kind::radius_uniform_angle;
        cfg.initial.r0 = r0;
    }
    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("simulate", version_string);
    pf.record(manifest);
    manifest.parameter("dt", cfg.dt);
    manifest.parameter("n_steps", cfg.n_steps);
    manifest.parameter("record_stride", cfg.record_stride);
    manifest.seed(cfg.seed);

    const auto traj = montecarlo::simulate(pf.params, cfg);
    const fs::path csv = dir / "trajectory.csv";
    montecarlo::write_trajectory_csv(traj, csv.string());
    manifest.output(csv);
    manifest.write(dir / "manifest.json");
    return exit_ok;
}

// ---------------------------------------------------------------- correlate

int run_correlate(const CommonOptions& common, ParamFlags& pf,
                  const std::vector<std::string>& observables, double dt,
                  std::int64_t n_steps, std::uint64_t seed, double max_lag_time,
                  double burn_in) {
    const json j = load_config(common);
    pf.finish(j);
    if (observables.empty()) throw ConfigError("correlate: pass at least one --obs");
    for (const auto& name : observables) observable_on_sample(name, 0.0, 0.0);
    if (max_lag_time <= 0.0) throw ConfigError("correlate: --max-lag-time must be positive");

    montecarlo::SimulationConfig cfg;
    cfg.dt = dt;
    cfg.n_steps = n_steps;
    cfg.seed = seed;
    cfg.initial.kind = montecarlo::InitialCondition::Kind::radius_uniform_angle;
    cfg.initial.r0 = model::estimate_sigma_hat(pf.params);
    cfg.validate(pf.params);

    const double burn = burn_in >= 0.0 ? burn_in : montecarlo::default_burn_in(pf.params);
    const auto burn_samples = static_cast<std::size_t>(burn / dt);
    const auto max_lag = static_cast<std::int64_t>(max_lag_time / dt);

    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("correlate", version_string);
    pf.record(manifest);
    manifest.parameter("dt", dt);
    manifest.parameter("n_steps", n_steps);
    manifest.parameter("burn_in", burn);
    manifest.parameter("max_lag_time", max_lag_time);
    manifest.seed(seed);

    const auto traj = montecarlo::simulate(pf.params, cfg);
    if (burn_samples + 2 * static_cast<std::size_t>(max_lag) >= traj.x.size()) {
        throw ConfigError("correlate: series too short for the requested burn-in and lag");
    }
    for (const auto& name : observables) {
        std::vector<double> series;
        series.reserve(traj.x.size() - burn_samples);
        for (std::size_t i = burn_samples; i < traj.x.size(); ++i) {
            series.push_back(observable_on_sample(name, traj.x[i], traj.y[i]));
        }
        const auto corr = montecarlo::empirical_correlation(series, series, dt, max_lag);
        spectral::SpectralSeries out;
        out.kind = spectral::SeriesKind::correlation;
        for (const auto& c : corr) {
            out.abscissa.push_back(c.lag);
            out.values.push_back({c.value, 0.0});
        }
        const fs::path csv = dir / ("correlation_" + name + ".csv");
        spectral::write_series_csv(out, csv.string());
        manifest.output(csv);
    }
    manifest.write(dir / "manifest.json");
    return exit_ok;
}

// ---------------------------------------------------------------- power

int run_power(const CommonOptions& common, ParamFlags& pf, GridFlags& gf, SolverFlags& sf,
              int k, const std::vector<std::string>& observables, double z_max,
              int z_points) {
    const json j = load_config(common);
    pf.finish(j);
    gf.finish(j);
    sf.finish(j);
    if (observables.empty()) throw ConfigError("power: pass at least one --obs");
    for (const auto& name : observables) observable_on_sample(name, 0.0, 0.0);
    if (z_points < 2 || z_max <= 0.0) throw ConfigError("power: bad frequency grid");

    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("power", version_string);
    pf.record(manifest);
    manifest.parameter("k", k);
    manifest.parameter("z_max", z_max);
    manifest.parameter("z_points", z_points);

    const Grid2D grid = gf.build(pf.params);
    gf.record(manifest, grid);
    const auto gen = fokker_planck::assemble(pf.params, grid);
    const auto spectrum = eigensolver::solve_mixing_spectrum(gen, k, sf.opts);

    const fs::path spectrum_csv = dir / "spectrum.csv";
    eigensolver::write_spectrum_csv(spectrum, spectrum_csv.string());
    manifest.output(spectrum_csv);

    std::vector<double> z_grid(static_cast<std::size_t>(z_points));
    for (int i = 0; i < z_points; ++i) z_grid[i] = z_max * i / (z_points - 1.0);

    for (const auto& name : observables) {
        const auto f = observable_on_grid(grid, name);
        const auto series = spectral::reconstruct_power_spectrum(spectrum, f, f, z_grid);
        const fs::path csv = dir / ("power_" + name + ".csv");
        spectral::write_series_csv(series, csv.string());
        manifest.output(csv);
        json weights = json::array();
        for (const auto& w : series.weights) weights.push_back({w.real(), w.imag()});
        manifest.parameter("weights_" + name, weights);
    }
    manifest.write(dir / "manifest.json");
    return spectrum.fully_converged ? exit_ok : exit_partial;
}

// ---------------------------------------------------------------- sweep

int run_sweep_cmd(const CommonOptions& common, ParamFlags& pf, GridFlags& gf, SolverFlags& sf,
                  const std::string& vary, std::vector<double> values, int k,
                  bool fixed_grid, int threads) {
    const json j = load_config(common);
    pf.finish(j);
    gf.finish(j);
    sf.finish(j);
    if (values.empty() && j.contains("values")) {
        values = j.at("values").get<std::vector<double>>();
    }
    if (values.empty()) throw ConfigError("sweep: pass --values");

    sweeps::SweepConfig cfg;
    if (vary == "delta") cfg.varying = sweeps::Vary::delta;
    else if (vary == "epsilon") cfg.varying = sweeps::Vary::epsilon;
    else if (vary == "beta") cfg.varying = sweeps::Vary::beta;
    else throw ConfigError("sweep: --vary must be delta, epsilon or beta");
    cfg.values = std::move(values);
    cfg.base = pf.params;
    cfg.nx = gf.nx;
    cfg.ny = gf.ny;
    cfg.width_multiplier = gf.width_multiplier;
    cfg.fixed_grid = fixed_grid;
    cfg.k = k;
    cfg.solver = sf.opts;
    cfg.n_threads = threads > 0 ? threads : default_threads();

    const fs::path dir = prepare_output_dir(common);
    cfg.output_csv = (dir / "sweep.csv").string();

    cli::RunManifest manifest("sweep", version_string);
    pf.record(manifest);
    manifest.parameter("vary", vary);
    manifest.parameter("values", cfg.values);
    manifest.parameter("k", k);
    manifest.parameter("nx", cfg.nx);
    manifest.parameter("ny", cfg.ny);
    manifest.parameter("fixed_grid", fixed_grid);

    const auto result = sweeps::run_sweep(cfg);
    manifest.output(dir / "sweep.csv");

    // Least-squares fits of the tracked second eigenvalue.
    json fits = json::object();
    std::vector<double> xs, re1, im1;
    for (const auto& pt : result.points) {
        if (!pt.ok) continue;
        xs.push_back(pt.param);
        re1.push_back(pt.lambda1.real());
        im1.push_back(pt.lambda1.imag());
    }
    const auto to_json = [](const sweeps::FitResult& fit) {
        json f;
        f["model"] = fit.model == sweeps::FitModel::linear_in_x ? "linear_in_x"
                                                                : "linear_in_x_squared";
        f["a"] = fit.a;
        f["b"] = fit.b;
        f["r_squared"] = fit.r_squared;
        return f;
    };
    if (xs.size() >= 3) {
        fits["re_lambda1_linear"] =
            to_json(sweeps::fit_scaling(xs, re1, sweeps::FitModel::linear_in_x));
        fits["re_lambda1_quadratic"] =
            to_json(sweeps::fit_scaling(xs, re1, sweeps::FitModel::linear_in_x_squared));
        fits["im_lambda1_linear"] =
            to_json(sweeps::fit_scaling(xs, im1, sweeps::FitModel::linear_in_x));
    }
    const fs::path fits_path = dir / "fits.json";
    {
        std::ofstream out(fits_path);
        out << fits.dump(2) << '\n';
    }
    manifest.output(fits_path);

    int failures = 0;
    for (const auto& pt : result.points) {
        if (!pt.ok) {
            ++failures;
            std::cerr << "sweep point " << pt.param << " failed: " << pt.error << '\n';
        }
    }
    manifest.parameter("failed_points", failures);
    manifest.write(dir / "manifest.json");
    return failures == 0 ? exit_ok : exit_partial;
}

// ---------------------------------------------------------------- isochron

int run_isochron(const CommonOptions& common, ParamFlags& pf, const std::string& forcing,
                 double sigma, int depth, int n_points) {
    const json j = load_config(common);
    pf.finish(j);
    model::ForcingField field;
    if (forcing == "radial") field = model::ForcingField::radial(sigma);
    else if (forcing == "azimuthal") field = model::ForcingField::azimuthal(sigma);
    else if (forcing == "isochron") {
        if (pf.params.delta <= 0.0) {
            throw ConfigError("isochron-tangent forcing needs delta > 0");
        }
        field = model::ForcingField::isochron_tangent(pf.params, sigma);
    } else {
        throw ConfigError("isochron: --forcing must be radial, azimuthal or isochron");
    }

    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("isochron", version_string);
    pf.record(manifest);
    manifest.parameter("forcing", forcing);
    manifest.parameter("sigma", sigma);
    manifest.parameter("depth", depth);

    const fs::path csv = dir / "isochron.csv";
    {
        std::ofstream out(csv);
        out << "r,theta,phi,rank\n";
        const double r_ref = pf.params.delta > 0.0 ? std::sqrt(pf.params.delta) : 1.0;
        int rank_min = 2, rank_max = 1;
        for (int i = 0; i < n_points; ++i) {
            const double r = r_ref * (0.5 + 1.5 * i / std::max(1, n_points - 1));
            const double theta = 2.0 * M_PI * i / std::max(1, n_points);
            const double phi = model::asymptotic_phase(pf.params, r, theta);
            const int rank = model::hormander_rank(pf.params, field, r, theta, depth);
            rank_min = std::min(rank_min, rank);
            rank_max = std::max(rank_max, rank);
            out << r << ',' << theta << ',' << phi << ',' << rank << '\n';
        }
        manifest.parameter("rank_min", rank_min);
        manifest.parameter("rank_max", rank_max);
        std::cout << "hypoellipticity rank over " << n_points << " points: min " << rank_min
                  << ", max " << rank_max << '\n';
    }
    manifest.output(csv);
    manifest.write(dir / "manifest.json");
    return exit_ok;
}

// ---------------------------------------------------------------- floquet

int run_floquet(const CommonOptions& common, ParamFlags& pf) {
    const json j = load_config(common);
    pf.finish(j);
    const auto fd = model::floquet_data(pf.params);
    const double phi = model::phase_diffusion_coefficient(pf.params);

    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("floquet", version_string);
    pf.record(manifest);

    json doc;
    doc["period"] = fd.period;
    doc["characteristic_exponents"] = {fd.exponents[0], fd.exponents[1]};
    doc["multipliers"] = {fd.multipliers()[0], fd.multipliers()[1]};
    doc["e1"] = {fd.e1[0], fd.e1[1]};
    doc["e2"] = {fd.e2[0], fd.e2[1]};
    doc["f1"] = {fd.f1[0], fd.f1[1]};
    doc["f2"] = {fd.f2[0], fd.f2[1]};
    doc["R"] = {{fd.R[0][0], fd.R[0][1]}, {fd.R[1][0], fd.R[1][1]}};
    doc["phase_diffusion_coefficient"] = phi;
    const fs::path path = dir / "floquet.json";
    {
        std::ofstream out(path);
        out << doc.dump(2) << '\n';
    }
    manifest.output(path);
    manifest.write(dir / "manifest.json");
    std::cout << "T = " << fd.period << ", exponents (" << fd.exponents[0] << ", "
              << fd.exponents[1] << "), Phi = " << phi << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- bound

int run_bound(const CommonOptions& common, ParamFlags& pf, double r0, double horizon,
              int n_traj, std::uint64_t seed, double dt) {
    const json j = load_config(common);
    pf.finish(j);
    const fs::path dir = prepare_output_dir(common);
    cli::RunManifest manifest("bound", version_string);
    pf.record(manifest);
    manifest.parameter("r0", r0);
    manifest.parameter("horizon", horizon);
    manifest.parameter("n_trajectories", n_traj);
    manifest.parameter("dt", dt);
    manifest.seed(seed);

    const auto report = montecarlo::check_ultimate_bound(pf.params, r0, horizon, n_traj,
                                                         seed, dt);
    const fs::path ensemble_csv = dir / "ensemble.csv";
    montecarlo::write_ensemble_csv(report.moments, ensemble_csv.string());
    manifest.output(ensemble_csv);

    json doc;
    doc["passed"] = report.passed;
    doc["max_violation_in_se_units"] = report.max_violation_se;
    doc["c"] = report.c;
    doc["d"] = report.d;
    doc["fitted_decay_rate"] = report.fitted_decay_rate;
    const fs::path report_path = dir / "bound_report.json";
    {
        std::ofstream out(report_path);
        out << doc.dump(2) << '\n';
    }
    manifest.output(report_path);
    manifest.write(dir / "manifest.json");
    std::cout << (report.passed ? "bound respected" : "bound violated")
              << " (max violation " << report.max_violation_se << " SE, c = " << report.c
              << ", d = " << report.d << ")\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixing spectrum of the stochastic Hopf normal form"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string);

    // spectrum
    auto* c_spectrum = app.add_subcommand("spectrum", "Discretize and eigensolve");
    CommonOptions common_spectrum;
    ParamFlags pf_spectrum;
    GridFlags gf_spectrum;
    SolverFlags sf_spectrum;
    int spectrum_k = 10;
    attach_common(c_spectrum, common_spectrum);
    pf_spectrum.attach(c_spectrum);
    gf_spectrum.attach(c_spectrum);
    sf_spectrum.attach(c_spectrum);
    c_spectrum->add_option("--k", spectrum_k, "Number of eigenpairs");

    // analytic
    auto* c_analytic = app.add_subcommand("analytic", "Small-noise eigenvalue formulas");
    CommonOptions common_analytic;
    ParamFlags pf_analytic;
    int l_max = 3, n_max = 3;
    attach_common(c_analytic, common_analytic);
    pf_analytic.attach(c_analytic);
    c_analytic->add_option("--l-max", l_max, "Radial index bound");
    c_analytic->add_option("--n-max", n_max, "Azimuthal index bound");

    // simulate
    auto* c_simulate = app.add_subcommand("simulate", "Euler-Maruyama trajectory");
    CommonOptions common_simulate;
    ParamFlags pf_simulate;
    montecarlo::SimulationConfig sim_cfg;
    double sim_r0 = 1.0;
    attach_common(c_simulate, common_simulate);
    pf_simulate.attach(c_simulate);
    c_simulate->add_option("--dt", sim_cfg.dt, "Time step");
    c_simulate->add_option("--steps", sim_cfg.n_steps, "Number of steps");
    c_simulate->add_option("--seed", sim_cfg.seed, "RNG seed");
    c_simulate->add_option("--stride", sim_cfg.record_stride, "Record every n-th step");
    c_simulate->add_option("--x0", sim_cfg.initial.x, "Initial x");
    c_simulate->add_option("--y0", sim_cfg.initial.y, "Initial y");
    auto* o_sim_r0 = c_simulate->add_option("--r0", sim_r0,
                                            "Start at this radius, uniform random angle");

    // correlate
    auto* c_correlate = app.add_subcommand("correlate", "Empirical correlation functions");
    CommonOptions common_correlate;
    ParamFlags pf_correlate;
    std::vector<std::string> corr_obs;
    double corr_dt = 1e-3, corr_max_lag = 2.0, corr_burn = -1.0;
    std::int64_t corr_steps = 1000000;
    std::uint64_t corr_seed = 0;
    attach_common(c_correlate, common_correlate);
    pf_correlate.attach(c_correlate);
    c_correlate->add_option("--obs", corr_obs, "Observables (x, y, x2, x3, r2)");
    c_correlate->add_option("--dt", corr_dt, "Time step");
    c_correlate->add_option("--steps", corr_steps, "Number of steps");
    c_correlate->add_option("--seed", corr_seed, "RNG seed");
    c_correlate->add_option("--max-lag-time", corr_max_lag, "Largest lag in time units");
    c_correlate->add_option("--burn-in", corr_burn,
                            "Discarded initial time (default 10/min(|delta|, eps^2))");

    // power
    auto* c_power = app.add_subcommand("power", "Reconstructed power spectra");
    CommonOptions common_power;
    ParamFlags pf_power;
    GridFlags gf_power;
    SolverFlags sf_power;
    std::vector<std::string> power_obs;
    int power_k = 20, z_points = 211;
    double z_max = 4.2;
    attach_common(c_power, common_power);
    pf_power.attach(c_power);
    gf_power.attach(c_power);
    sf_power.attach(c_power);
    c_power->add_option("--obs", power_obs, "Observables (x, y, x2, x3, r2)");
    c_power->add_option("--k", power_k, "Number of eigenpairs");
    c_power->add_option("--z-max", z_max, "Largest angular frequency");
    c_power->add_option("--z-points", z_points, "Frequency grid size");

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "Parameter sweep of the leading spectrum");
    CommonOptions common_sweep;
    ParamFlags pf_sweep;
    GridFlags gf_sweep;
    SolverFlags sf_sweep;
    std::string sweep_vary = "delta";
    std::vector<double> sweep_values;
    int sweep_k = 8, sweep_threads = 0;
    bool sweep_fixed_grid = false;
    attach_common(c_sweep, common_sweep);
    pf_sweep.attach(c_sweep);
    gf_sweep.attach(c_sweep);
    sf_sweep.attach(c_sweep);
    c_sweep->add_option("--vary", sweep_vary, "Swept parameter: delta, epsilon or beta");
    c_sweep->add_option("--values", sweep_values, "Sweep values")->delimiter(',');
    c_sweep->add_option("--k", sweep_k, "Eigenpairs per point");
    c_sweep->add_flag("--fixed-grid", sweep_fixed_grid,
                      "Reuse the first point's grid across the sweep");
    c_sweep->add_option("--threads", sweep_threads,
                        "Concurrent sweep points (default HOPFSPEC_THREADS)");

    // isochron
    auto* c_isochron = app.add_subcommand("isochron", "Asymptotic phase and bracket ranks");
    CommonOptions common_isochron;
    ParamFlags pf_isochron;
    std::string forcing = "radial";
    double iso_sigma = 1.0;
    int iso_depth = 2, iso_points = 20;
    attach_common(c_isochron, common_isochron);
    pf_isochron.attach(c_isochron);
    c_isochron->add_option("--forcing", forcing, "radial, azimuthal or isochron");
    c_isochron->add_option("--sigma", iso_sigma, "Forcing amplitude");
    c_isochron->add_option("--depth", iso_depth, "Bracket depth");
    c_isochron->add_option("--points", iso_points, "Number of sample points");

    // floquet
    auto* c_floquet = app.add_subcommand("floquet", "Floquet data and phase diffusion");
    CommonOptions common_floquet;
    ParamFlags pf_floquet;
    attach_common(c_floquet, common_floquet);
    pf_floquet.attach(c_floquet);

    // bound
    auto* c_bound = app.add_subcommand("bound", "Monte Carlo ultimate-bound check");
    CommonOptions common_bound;
    ParamFlags pf_bound;
    double bound_r0 = 1.5, bound_horizon = 5.0, bound_dt = 1e-3;
    int bound_traj = 10000;
    std::uint64_t bound_seed = 0;
    attach_common(c_bound, common_bound);
    pf_bound.attach(c_bound);
    c_bound->add_option("--r0", bound_r0, "Initial radius");
    c_bound->add_option("--horizon", bound_horizon, "Time horizon");
    c_bound->add_option("--trajectories", bound_traj, "Ensemble size");
    c_bound->add_option("--seed", bound_seed, "RNG seed");
    c_bound->add_option("--dt", bound_dt, "Time step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_spectrum->parsed()) {
            return run_spectrum(common_spectrum, pf_spectrum, gf_spectrum, sf_spectrum,
                                spectrum_k);
        }
        if (c_analytic->parsed()) {
            return run_analytic(common_analytic, pf_analytic, l_max, n_max);
        }
        if (c_simulate->parsed()) {
            return run_simulate(common_simulate, pf_simulate, sim_cfg, sim_r0, o_sim_r0);
        }
        if (c_correlate->parsed()) {
            return run_correlate(common_correlate, pf_correlate, corr_obs, corr_dt,
                                 corr_steps, corr_seed, corr_max_lag, corr_burn);
        }
        if (c_power->parsed()) {
            return run_power(common_power, pf_power, gf_power, sf_power, power_k, power_obs,
                             z_max, z_points);
        }
        if (c_sweep->parsed()) {
            return run_sweep_cmd(common_sweep, pf_sweep, gf_sweep, sf_sweep, sweep_vary,
                                 sweep_values, sweep_k, sweep_fixed_grid, sweep_threads);
        }
        if (c_isochron->parsed()) {
            return run_isochron(common_isochron, pf_isochron, forcing, iso_sigma, iso_depth,
                                iso_points);
        }
        if (c_floquet->parsed()) {
            return run_floquet(common_floquet, pf_floquet);
        }
        if (c_bound->parsed()) {
            return run_bound(common_bound, pf_bound, bound_r0, bound_horizon, bound_traj,
                             bound_seed, bound_dt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
