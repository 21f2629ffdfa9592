#include "hopfspec/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hopfspec/detail/format.hpp"
#include "hopfspec/fokker_planck.hpp"

namespace hopfspec::sweeps {

namespace {

ModelParams apply_value(const ModelParams& base, Vary varying, double value) {
    ModelParams p = base;
    switch (varying) {
        case Vary::delta: p.delta = value; break;
        case Vary::epsilon: p.epsilon = value; break;
        case Vary::beta: p.beta = value; break;
    }
    return p;
}

struct ParsedRows {
    std::set<double> params_done;
    std::vector<SweepRow> rows;
};

ParsedRows parse_existing_csv(const std::string& path) {
    ParsedRows parsed;
    std::ifstream in(path);
    if (!in) return parsed;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string cell;
        SweepRow row;
        double re = 0.0, im = 0.0;
        if (!std::getline(ss, cell, ',')) continue;
        row.param = std::stod(cell);
        if (!std::getline(ss, cell, ',')) continue;
        row.j = std::stoi(cell);
        if (!std::getline(ss, cell, ',')) continue;
        re = std::stod(cell);
        if (!std::getline(ss, cell, ',')) continue;
        im = std::stod(cell);
        if (!std::getline(ss, cell, ',')) continue;
        row.residual = std::stod(cell);
        row.lambda = {re, im};
        parsed.rows.push_back(row);
        parsed.params_done.insert(row.param);
    }
    return parsed;
}

bool value_done(const std::set<double>& done, double value) {
    for (double d : done) {
        if (std::abs(d - value) <= 1e-12 * std::max(1.0, std::abs(value))) return true;
    }
    return false;
}

// Tracked second eigenvalue: largest real part among nonzero modes, taken
// with nonnegative imaginary part.
std::complex<double> pick_lambda1(const std::vector<eigensolver::RitzPair>& pairs) {
    std::complex<double> best{-std::numeric_limits<double>::infinity(), 0.0};
    double scale = 0.0;
    for (const auto& p : pairs) scale = std::max(scale, std::abs(p.value));
    const double zero_tol = 1e-8 * std::max(scale, 1.0);
    for (const auto& p : pairs) {
        if (std::abs(p.value) <= zero_tol) continue;
        if (p.value.imag() < 0.0) continue;
        if (p.value.real() > best.real()) best = p.value;
    }
    return best;
}

} // namespace

void SweepConfig::validate() const {
    if (values.empty()) throw ConfigError("SweepConfig: values must be nonempty");
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("SweepConfig: values must be finite");
    }
    if (k < 2) throw ConfigError("SweepConfig: k must be >= 2");
    if (nx < 3 || ny < 3) throw ConfigError("SweepConfig: grid must be at least 3x3");
    if (n_threads < 1) throw ConfigError("SweepConfig: n_threads must be >= 1");
}

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();

    ParsedRows existing;
    if (!config.output_csv.empty()) {
        existing = parse_existing_csv(config.output_csv);
    }

    std::vector<SweepPoint> points(config.values.size());
    for (std::size_t i = 0; i < config.values.size(); ++i) {
        points[i].param = config.values[i];
    }

    // Seed already-computed points from the resumable CSV.
    for (auto& pt : points) {
        if (!value_done(existing.params_done, pt.param)) continue;
        pt.ok = true;
        for (const auto& row : existing.rows) {
            if (std::abs(row.param - pt.param) <=
                1e-12 * std::max(1.0, std::abs(pt.param))) {
                eigensolver::RitzPair rp;
                rp.value = row.lambda;
                rp.residual = row.residual;
                pt.eigenvalues.push_back(std::move(rp));
            }
        }
    }

    std::optional<Grid2D> shared_grid;
    if (config.fixed_grid) {
        shared_grid = build_grid(apply_value(config.base, config.varying, config.values[0]),
                                 config.nx, config.ny, config.width_multiplier);
    }

    std::mutex io_mutex;
    std::ofstream incremental;
    const bool write_incremental = !config.output_csv.empty();
    if (write_incremental) {
        const bool fresh = existing.rows.empty();
        incremental.open(config.output_csv, fresh ? std::ios::trunc : std::ios::app);
        if (fresh) incremental << "param,j,re_lambda,im_lambda,residual\n";
    }

    std::atomic<std::size_t> next_index{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next_index.fetch_add(1);
            if (i >= points.size()) break;
            SweepPoint& pt = points[i];
            if (pt.ok) continue;  // resumed from file
            try {
                const ModelParams p = apply_value(config.base, config.varying, pt.param);
                const Grid2D grid =
                    shared_grid ? *shared_grid
                                : build_grid(p, config.nx, config.ny, config.width_multiplier);
                const auto gen = fokker_planck::assemble(p, grid);
                pt.eigenvalues = eigensolver::leading_eigenvalues(gen, config.k, config.solver);
                pt.ok = true;
                if (write_incremental) {
                    std::lock_guard<std::mutex> lock(io_mutex);
                    for (std::size_t j = 0; j < pt.eigenvalues.size(); ++j) {
                        incremental << detail::g17(pt.param) << ',' << j << ','
                                    << detail::g17(pt.eigenvalues[j].value.real()) << ','
                                    << detail::g17(pt.eigenvalues[j].value.imag()) << ','
                                    << detail::g17(pt.eigenvalues[j].residual) << '\n';
                    }
                    incremental.flush();
                }
            } catch (const std::exception& e) {
                pt.ok = false;
                pt.error = e.what();
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(config.n_threads,
                                                    static_cast<int>(points.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (incremental.is_open()) incremental.close();

    std::sort(points.begin(), points.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.param < b.param; });

    // Continuation tracking of lambda_1 across points. The target is the
    // secant extrapolation from the previous two points, which carries the
    // branch through real-axis crossings where a nearest-to-previous rule
    // would hop onto the conjugate member.
    int n_prev = 0;
    std::complex<double> prev{0.0, 0.0}, prev2{0.0, 0.0};
    double prev_param = 0.0, prev2_param = 0.0;
    for (auto& pt : points) {
        if (!pt.ok || pt.eigenvalues.empty()) continue;
        if (n_prev == 0) {
            pt.lambda1 = pick_lambda1(pt.eigenvalues);
        } else {
            std::complex<double> target = prev;
            if (n_prev >= 2 && prev_param != prev2_param) {
                const double ratio = (pt.param - prev_param) / (prev_param - prev2_param);
                target = prev + (prev - prev2) * ratio;
            }
            double best = std::numeric_limits<double>::infinity();
            double second = best;
            std::complex<double> chosen = pick_lambda1(pt.eigenvalues);
            double scale = 0.0;
            for (const auto& e : pt.eigenvalues) scale = std::max(scale, std::abs(e.value));
            const double zero_tol = 1e-8 * std::max(scale, 1.0);
            for (const auto& e : pt.eigenvalues) {
                if (std::abs(e.value) <= zero_tol) continue;
                const double dist = std::abs(e.value - target);
                if (dist < best) {
                    second = best;
                    best = dist;
                    chosen = e.value;
                } else if (dist < second) {
                    second = dist;
                }
            }
            pt.lambda1 = chosen;
            pt.tracking_ambiguous = std::isfinite(second) && second < 1.2 * best;
        }
        prev2 = prev;
        prev2_param = prev_param;
        prev = pt.lambda1;
        prev_param = pt.param;
        ++n_prev;
    }

    SweepResult result;
    result.points = std::move(points);
    for (const auto& pt : result.points) {
        for (std::size_t j = 0; j < pt.eigenvalues.size(); ++j) {
            result.rows.push_back({pt.param, static_cast<int>(j), pt.eigenvalues[j].value,
                                   pt.eigenvalues[j].residual});
        }
    }

    // Rewrite the CSV sorted once the sweep completed.
    if (write_incremental) {
        write_sweep_csv(result, config.output_csv);
    }
    return result;
}

FitResult fit_scaling(const std::vector<double>& xs, const std::vector<double>& ys,
                      FitModel model) {
    if (xs.size() != ys.size()) throw DimensionError("fit_scaling: xs and ys differ in length");
    if (xs.size() < 3) throw ConfigError("fit_scaling: need at least 3 points");

    std::vector<double> t(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        t[i] = model == FitModel::linear_in_x ? xs[i] : xs[i] * xs[i];
    }
    const double n = static_cast<double>(t.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += ys[i];
    }
    const double mean_t = st / n, mean_y = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mean_t) * (t[i] - mean_t);
        sty += (t[i] - mean_t) * (ys[i] - mean_y);
        syy += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    if (stt == 0.0) {
        throw ConfigError("fit_scaling: rank-deficient design (constant abscissa)");
    }
    FitResult fit;
    fit.model = model;
    fit.b = sty / stt;
    fit.a = mean_y - fit.b * mean_t;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double resid = ys[i] - (fit.a + fit.b * t[i]);
        ss_res += resid * resid;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_sweep_csv: cannot open " + path);
    out << "param,j,re_lambda,im_lambda,residual\n";
    for (const auto& row : result.rows) {
        out << detail::g17(row.param) << ',' << row.j << ','
            << detail::g17(row.lambda.real()) << ',' << detail::g17(row.lambda.imag())
            << ',' << detail::g17(row.residual) << '\n';
    }
}

} // namespace hopfspec::sweeps
