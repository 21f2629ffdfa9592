#include <cmath>
#include <fstream>

#include "doctest.h"
#include "hopfspec/eigensolver.hpp"
#include "hopfspec/fokker_planck.hpp"
#include "hopfspec/model.hpp"
#include "hopfspec/montecarlo.hpp"

using namespace hopfspec;

TEST_SUITE_BEGIN("fokker_planck");

TEST_CASE("Chang-Cooper weight tends to central differencing for small Peclet") {
    CHECK(fokker_planck::chang_cooper_weight(0.0) == doctest::Approx(0.5));
    CHECK(fokker_planck::chang_cooper_weight(1e-9) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(fokker_planck::chang_cooper_weight(1e-3) ==
          doctest::Approx(0.5 + 1e-3 / 12.0).epsilon(1e-6));
    // strong drift limits: full upwinding
    CHECK(fokker_planck::chang_cooper_weight(60.0) == doctest::Approx(1.0 - 1.0 / 60.0));
    CHECK(fokker_planck::chang_cooper_weight(-60.0) == doctest::Approx(1.0 / 60.0));
}

TEST_CASE("pure diffusion assembles the reflecting five-point Laplacian") {
    const double eps = 0.7;
    Grid2D grid = build_grid_with_half_width(3, 3, 1.5);
    const auto gen = fokker_planck::assemble_with_drift(
        grid, [](double, double) { return std::array<double, 2>{0.0, 0.0}; }, eps,
        ModelParams{0.0, 0.0, 0.0, eps});
    const double h = grid.dx();
    const double c = 0.5 * eps * eps / (h * h);

    // Hand-assembled 9x9 reflecting Laplacian scaled by eps^2/2.
    std::vector<std::vector<double>> expected(9, std::vector<double>(9, 0.0));
    for (int iy = 0; iy < 3; ++iy) {
        for (int ix = 0; ix < 3; ++ix) {
            const int i = iy * 3 + ix;
            int neighbors = 0;
            const auto add = [&](int jx, int jy) {
                if (jx < 0 || jx >= 3 || jy < 0 || jy >= 3) return;
                expected[i][jy * 3 + jx] += c;
                ++neighbors;
            };
            add(ix - 1, iy);
            add(ix + 1, iy);
            add(ix, iy - 1);
            add(ix, iy + 1);
            expected[i][i] = -c * neighbors;
        }
    }
    for (int row = 0; row < 9; ++row) {
        std::vector<double> unit(9, 0.0), out(9);
        unit[row] = 1.0;
        // column row of the operator = A e_row read through apply on unit vectors
        gen.adjoint.apply(unit.data(), out.data());
        for (int col = 0; col < 9; ++col) {
            CHECK(out[col] == doctest::Approx(expected[col][row]).epsilon(1e-13));
        }
    }
}

TEST_CASE("column sums vanish and the sign pattern is Metzler") {
    ModelParams p{0.7, 1.0, 0.4, 0.6};
    Grid2D grid = build_grid(p, 24, 24, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    const auto sums = gen.adjoint.column_sums();
    const double scale = gen.adjoint.max_abs_value();
    for (double s : sums) CHECK(std::abs(s) <= 1e-12 * scale);

    for (int row = 0; row < gen.adjoint.n_rows(); ++row) {
        for (std::size_t k = gen.adjoint.row_offsets()[row];
             k < gen.adjoint.row_offsets()[row + 1]; ++k) {
            const int col = gen.adjoint.col_indices()[k];
            const double v = gen.adjoint.values()[k];
            if (col == row) {
                CHECK(v <= 0.0);
            } else {
                CHECK(v >= 0.0);
            }
        }
    }
}

TEST_CASE("randomized parameter fuzz keeps conservation and positivity") {
    montecarlo::CounterRng rng(7777, 0);
    for (int draw = 0; draw < 12; ++draw) {
        ModelParams p;
        p.delta = -5.0 + 12.0 * rng.uniform();
        p.gamma = 0.5 + 1.5 * rng.uniform();
        p.beta = rng.uniform();
        p.epsilon = 0.2 + 1.8 * rng.uniform();
        Grid2D grid = build_grid(p, 16, 16, 5.0);
        const auto gen = fokker_planck::assemble(p, grid);
        const double scale = gen.adjoint.max_abs_value();
        for (double s : gen.adjoint.column_sums()) CHECK(std::abs(s) <= 1e-12 * scale);
        bool metzler = true;
        for (int row = 0; row < gen.adjoint.n_rows(); ++row) {
            for (std::size_t k = gen.adjoint.row_offsets()[row];
                 k < gen.adjoint.row_offsets()[row + 1]; ++k) {
                const double v = gen.adjoint.values()[k];
                if (gen.adjoint.col_indices()[k] == row ? v > 0.0 : v < 0.0) metzler = false;
            }
        }
        CHECK(metzler);
    }
}

TEST_CASE("apply: conservation, kernel of the generator, dense oracle") {
    ModelParams p{-0.5, 1.0, 0.2, 0.8};
    Grid2D grid = build_grid(p, 4, 4, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);

    SUBCASE("adjoint output always sums to zero") {
        GridField field(grid);
        montecarlo::CounterRng rng(3, 0);
        for (auto& v : field.values) v = rng.uniform();
        const auto out = fokker_planck::apply(gen.adjoint, field);
        double sum = 0.0;
        for (const auto& v : out.values) sum += v.real();
        CHECK(std::abs(sum) <= 1e-12 * gen.adjoint.max_abs_value());
    }
    SUBCASE("constants lie in the kernel of the generator") {
        const auto out = fokker_planck::apply(gen.generator, constant_field(grid));
        for (const auto& v : out.values) {
            CHECK(std::abs(v) <= 1e-12 * gen.generator.max_abs_value());
        }
    }
    SUBCASE("matches a dense matrix-vector product") {
        const int n = static_cast<int>(grid.n_cells());
        // densify via unit vectors
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (int col = 0; col < n; ++col) {
            std::vector<double> unit(n, 0.0), out(n);
            unit[col] = 1.0;
            gen.adjoint.apply(unit.data(), out.data());
            for (int row = 0; row < n; ++row) dense[row][col] = out[row];
        }
        GridField field(grid);
        montecarlo::CounterRng rng(5, 0);
        for (auto& v : field.values) v = {rng.uniform(), rng.uniform()};
        const auto got = fokker_planck::apply(gen.adjoint, field);
        for (int row = 0; row < n; ++row) {
            std::complex<double> acc{0.0, 0.0};
            for (int col = 0; col < n; ++col) acc += dense[row][col] * field.values[col];
            CHECK(std::abs(got.values[row] - acc) < 1e-12 * gen.adjoint.max_abs_value());
        }
    }
}

TEST_CASE("transpose pairing <K u, rho> equals <u, K* rho>") {
    ModelParams p{0.3, 1.0, 0.5, 0.7};
    Grid2D grid = build_grid(p, 12, 12, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    montecarlo::CounterRng rng(11, 0);
    GridField u(grid), rho(grid);
    for (auto& v : u.values) v = 2.0 * rng.uniform() - 1.0;
    for (auto& v : rho.values) v = rng.uniform();
    const auto ku = fokker_planck::apply(gen.generator, u);
    const auto krho = fokker_planck::apply(gen.adjoint, rho);
    std::complex<double> lhs{0.0, 0.0}, rhs{0.0, 0.0};
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        lhs += ku.values[i] * rho.values[i];
        rhs += u.values[i] * krho.values[i];
    }
    CHECK(lhs.real() == doctest::Approx(rhs.real()).epsilon(1e-12));
}

TEST_CASE("implicit Euler step") {
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, 48, 48, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);

    SUBCASE("point mass keeps unit mass") {
        GridField rho(grid);
        rho.at(24, 24) = 1.0 / grid.cell_area();
        const auto out = fokker_planck::implicit_step(gen, rho, 0.01);
        double mass = 0.0, min_val = 0.0;
        for (const auto& v : out.values) {
            mass += v.real() * grid.cell_area();
            min_val = std::min(min_val, v.real());
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(min_val >= -1e-12 / grid.cell_area());
    }
    SUBCASE("discrete stationary density is a fixed point") {
        eigensolver::ArnoldiOptions opts;
        opts.k = 3;
        opts.selection = eigensolver::Selection::largest_magnitude_of_shift_inverted;
        const auto spectrum = eigensolver::solve_mixing_spectrum(gen, 3, opts);
        const auto& rho = spectrum.invariant_density;
        const auto out = fokker_planck::implicit_step(gen, rho, 0.5);
        double worst = 0.0;
        for (std::size_t i = 0; i < rho.values.size(); ++i) {
            worst = std::max(worst, std::abs(out.values[i].real() - rho.values[i].real()));
        }
        double peak = 0.0;
        for (const auto& v : rho.values) peak = std::max(peak, v.real());
        CHECK(worst <= 1e-7 * peak);
    }
}

TEST_CASE("degenerate configurations are rejected before assembly") {
    Grid2D grid = build_grid_with_half_width(8, 8, 2.0);
    CHECK_THROWS_AS(fokker_planck::assemble(ModelParams{1.0, 1.0, 0.0, 0.0}, grid),
                    ConfigError);
    Grid2D tiny = build_grid_with_half_width(2, 2, 1.0);
    CHECK_THROWS_AS(fokker_planck::assemble(ModelParams{1.0, 1.0, 0.0, 1.0}, tiny),
                    ConfigError);
}

TEST_CASE("coordinate export writes entries and grid metadata") {
    ModelParams p{0.5, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, 8, 8, 4.0);
    const auto gen = fokker_planck::assemble(p, grid);
    fokker_planck::export_matrix(gen, "op_test.txt", "op_test.json");
    std::ifstream mat("op_test.txt");
    int rows = 0;
    std::string line;
    while (std::getline(mat, line)) ++rows;
    CHECK(rows == static_cast<int>(gen.adjoint.n_entries()));
    std::ifstream side("op_test.json");
    std::string all((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
    CHECK(all.find("\"nx\": 8") != std::string::npos);
    CHECK(all.find("row_major") != std::string::npos);
    std::remove("op_test.txt");
    std::remove("op_test.json");
}

TEST_SUITE_END();
