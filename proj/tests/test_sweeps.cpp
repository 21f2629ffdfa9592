#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "hopfspec/fokker_planck.hpp"
#include "hopfspec/sweeps.hpp"

using namespace hopfspec;
using sweeps::FitModel;

TEST_SUITE_BEGIN("sweeps");

TEST_CASE("least squares fits") {
    SUBCASE("exact linear data") {
        std::vector<double> xs{-1.0, 0.0, 1.0, 2.0};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(2.0 + 3.0 * x);
        const auto fit = sweeps::fit_scaling(xs, ys, FitModel::linear_in_x);
        CHECK(fit.a == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.b == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(fit.r_squared == doctest::Approx(1.0));
    }
    SUBCASE("exact quadratic data") {
        std::vector<double> xs{0.0, 0.5, 1.0, 1.5, 2.0};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(1.0 - 0.5 * x * x);
        const auto fit = sweeps::fit_scaling(xs, ys, FitModel::linear_in_x_squared);
        CHECK(fit.a == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.b == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(fit.r_squared == doctest::Approx(1.0));
    }
    SUBCASE("rank-deficient design is rejected") {
        std::vector<double> xs{1.0, 1.0, 1.0};
        std::vector<double> ys{0.0, 1.0, 2.0};
        CHECK_THROWS_AS(sweeps::fit_scaling(xs, ys, FitModel::linear_in_x), ConfigError);
        CHECK_THROWS_AS(sweeps::fit_scaling({1.0, 2.0}, {0.0, 1.0}, FitModel::linear_in_x),
                        ConfigError);
    }
    SUBCASE("r_squared stays within [0, 1] on noisy data") {
        std::vector<double> xs{0.0, 1.0, 2.0, 3.0}, ys{0.1, 0.9, 2.2, 2.7};
        const auto fit = sweeps::fit_scaling(xs, ys, FitModel::linear_in_x);
        CHECK(fit.r_squared >= 0.0);
        CHECK(fit.r_squared <= 1.0);
    }
}

TEST_CASE("single-point sweep reduces to the direct eigensolve") {
    ModelParams base{-1.0, 1.0, 0.0, 1.0};
    sweeps::SweepConfig cfg;
    cfg.varying = sweeps::Vary::delta;
    cfg.values = {-1.0};
    cfg.base = base;
    cfg.nx = cfg.ny = 32;
    cfg.k = 5;
    cfg.solver.selection = eigensolver::Selection::largest_magnitude_of_shift_inverted;
    const auto res = sweeps::run_sweep(cfg);
    REQUIRE(res.points.size() == 1);
    REQUIRE(res.points[0].ok);

    Grid2D grid = build_grid(base, 32, 32, 5.0);
    const auto gen = fokker_planck::assemble(base, grid);
    const auto direct = eigensolver::leading_eigenvalues(gen, 5, cfg.solver);
    REQUIRE(res.points[0].eigenvalues.size() == direct.size());
    for (std::size_t j = 0; j < direct.size(); ++j) {
        CHECK(std::abs(res.points[0].eigenvalues[j].value - direct[j].value) < 1e-12);
    }
}

TEST_CASE("per-point failures are recorded and the sweep continues") {
    sweeps::SweepConfig cfg;
    cfg.varying = sweeps::Vary::epsilon;
    cfg.values = {0.0, 0.8};  // epsilon = 0 cannot be assembled
    cfg.base = ModelParams{-1.0, 1.0, 0.0, 1.0};
    cfg.nx = cfg.ny = 24;
    cfg.k = 4;
    cfg.solver.selection = eigensolver::Selection::largest_magnitude_of_shift_inverted;
    const auto res = sweeps::run_sweep(cfg);
    REQUIRE(res.points.size() == 2);
    CHECK_FALSE(res.points[0].ok);
    CHECK(!res.points[0].error.empty());
    CHECK(res.points[1].ok);
}

TEST_CASE("incremental CSV makes a sweep resumable") {
    const std::string path = "sweep_resume_test.csv";
    std::remove(path.c_str());
    sweeps::SweepConfig cfg;
    cfg.varying = sweeps::Vary::delta;
    cfg.values = {-1.0, -0.5};
    cfg.base = ModelParams{-1.0, 1.0, 0.0, 1.0};
    cfg.nx = cfg.ny = 24;
    cfg.k = 4;
    cfg.solver.selection = eigensolver::Selection::largest_magnitude_of_shift_inverted;
    cfg.output_csv = path;
    const auto first = sweeps::run_sweep(cfg);
    REQUIRE(first.points.size() == 2);

    // Re-running with an extra value only computes the new point; the old
    // rows survive byte-identically in the rewritten file.
    cfg.values = {-1.0, -0.5, -0.25};
    const auto second = sweeps::run_sweep(cfg);
    REQUIRE(second.points.size() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(second.points[i].ok);
        REQUIRE(second.points[i].eigenvalues.size() == first.points[i].eigenvalues.size());
        for (std::size_t j = 0; j < first.points[i].eigenvalues.size(); ++j) {
            CHECK(second.points[i].eigenvalues[j].value ==
                  first.points[i].eigenvalues[j].value);
        }
    }
    CHECK(second.points[2].ok);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "param,j,re_lambda,im_lambda,residual");
    std::remove(path.c_str());
}

TEST_CASE("continuation keeps lambda_1 on one branch") {
    sweeps::SweepConfig cfg;
    cfg.varying = sweeps::Vary::delta;
    cfg.values = {-1.2, -0.9, -0.6};
    cfg.base = ModelParams{-1.0, 1.0, 0.0, 1.0};
    cfg.nx = cfg.ny = 40;
    cfg.k = 6;
    cfg.solver.selection = eigensolver::Selection::largest_magnitude_of_shift_inverted;
    const auto res = sweeps::run_sweep(cfg);
    std::complex<double> prev{0.0, 0.0};
    bool first = true;
    for (const auto& pt : res.points) {
        REQUIRE(pt.ok);
        CHECK(pt.lambda1.imag() > 0.0);
        if (!first) {
            // jump stays below the local spacing (about |delta| here)
            CHECK(std::abs(pt.lambda1 - prev) < 0.5);
        }
        prev = pt.lambda1;
        first = false;
    }
}

TEST_SUITE_END();
