#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hopfspec/eigensolver.hpp"
#include "hopfspec/params.hpp"

namespace hopfspec::sweeps {

enum class Vary { delta, epsilon, beta };

struct SweepConfig {
    Vary varying = Vary::delta;
    std::vector<double> values;
    ModelParams base;
    int nx = 200;
    int ny = 200;
    double width_multiplier = 5.0;
    bool fixed_grid = false;          // reuse the grid of the first point
    int k = 8;
    eigensolver::ArnoldiOptions solver;
    std::string output_csv;           // optional; rows are appended as points finish
    int n_threads = 1;

    void validate() const;
};

struct SweepRow {
    double param = 0.0;
    int j = 0;
    std::complex<double> lambda{0.0, 0.0};
    double residual = 0.0;
};

struct SweepPoint {
    double param = 0.0;
    bool ok = false;
    std::string error;
    std::vector<eigensolver::RitzPair> eigenvalues;   // sorted, descending real part
    std::complex<double> lambda1{0.0, 0.0};           // tracked second eigenvalue
    bool tracking_ambiguous = false;
};

struct SweepResult {
    std::vector<SweepPoint> points;   // sorted by parameter value
    std::vector<SweepRow> rows;
};

/// One eigensolve per parameter value (grid rebuilt per point unless
/// fixed_grid), with lambda_1 tracked by nearest continuation from the
/// previous point. Per-point failures are recorded and the sweep continues.
/// Points already present in output_csv are skipped, making a crashed sweep
/// resumable.
SweepResult run_sweep(const SweepConfig& config);

enum class FitModel { linear_in_x, linear_in_x_squared };

struct FitResult {
    FitModel model = FitModel::linear_in_x;
    double a = 0.0;   // intercept
    double b = 0.0;   // slope (against x or x^2)
    double r_squared = 0.0;
};

/// Ordinary least squares for y = a + b x or y = a + b x^2; exact on
/// noiseless model data. Requires >= 3 points and non-constant abscissa.
FitResult fit_scaling(const std::vector<double>& xs, const std::vector<double>& ys,
                      FitModel model);

/// CSV "param,j,re_lambda,im_lambda,residual".
void write_sweep_csv(const SweepResult& result, const std::string& path);

} // namespace hopfspec::sweeps
