#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hopfspec/grid.hpp"
#include "hopfspec/model.hpp"
#include "hopfspec/montecarlo.hpp"
#include "hopfspec/quadrature.hpp"

using namespace hopfspec;

TEST_SUITE_BEGIN("grid");

TEST_CASE("uniform grid arithmetic, explicit half width") {
    Grid2D g = build_grid_with_half_width(2, 2, 1.0);
    CHECK(g.dx() == doctest::Approx(1.0));
    CHECK(g.dy() == doctest::Approx(1.0));
    CHECK(g.x(0) == doctest::Approx(-0.5));
    CHECK(g.x(1) == doctest::Approx(0.5));
    CHECK(g.y(0) == doctest::Approx(-0.5));
    CHECK(g.n_cells() == 4);
}

TEST_CASE("nx*dx recovers the full width exactly") {
    for (int nx : {2, 7, 200, 333}) {
        Grid2D g = build_grid_with_half_width(nx, nx + 1, 1.7);
        CHECK(nx * g.dx() == doctest::Approx(2.0 * g.half_width()).epsilon(1e-14));
        CHECK((nx + 1) * g.dy() == doctest::Approx(2.0 * g.half_width()).epsilon(1e-14));
        // centers strictly inside
        CHECK(std::abs(g.x(0)) < g.half_width());
        CHECK(std::abs(g.x(nx - 1)) < g.half_width());
    }
}

TEST_CASE("sigma-scaled grid matches an independent quadrature of the radial density") {
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D g = build_grid(p, 200, 200, 5.0);
    CHECK(g.nx() == 200);

    // Independent route: Simpson quadrature of E[x^2] = E[r^2]/2 against the
    // per-area stationary density, without going through estimate_sigma_hat.
    const auto radial_weight = [&](double r) {
        return r * std::exp(p.delta * r * r - 0.5 * r * r * r * r);  // eps = 1
    };
    const double i1 = simpson([&](double r) { return radial_weight(r); }, 0.0, 6.0, 4096);
    const double i3 =
        simpson([&](double r) { return r * r * radial_weight(r); }, 0.0, 6.0, 4096);
    const double sigma = std::sqrt(0.5 * i3 / i1);
    CHECK(g.half_width() == doctest::Approx(5.0 * sigma).epsilon(1e-8));
}

TEST_CASE("grid for epsilon = 0 demands an explicit half width") {
    ModelParams p{1.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(build_grid(p, 16, 16, 5.0), ConfigError);
    CHECK_NOTHROW(build_grid_with_half_width(16, 16, 2.0));
}

TEST_CASE("weighted inner product against a brute-force double loop") {
    Grid2D g = build_grid_with_half_width(3, 3, 1.0);
    GridField f(g), h(g), w(g);
    montecarlo::CounterRng rng(123, 0);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        f.values[i] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        h.values[i] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        w.values[i] = rng.uniform();
    }
    std::complex<double> expect{0.0, 0.0};
    for (int iy = 0; iy < 3; ++iy) {
        for (int ix = 0; ix < 3; ++ix) {
            expect += f.at(ix, iy) * std::conj(h.at(ix, iy)) * w.at(ix, iy).real() *
                      g.cell_area();
        }
    }
    const auto got = weighted_inner(f, h, w);
    CHECK(got.real() == doctest::Approx(expect.real()).epsilon(1e-13));
    CHECK(got.imag() == doctest::Approx(expect.imag()).epsilon(1e-13));
}

TEST_CASE("conjugation sits on the second argument") {
    Grid2D g = build_grid_with_half_width(4, 4, 1.0);
    GridField ones = constant_field(g);
    GridField i_ones = constant_field(g, {0.0, 1.0});
    GridField w = constant_field(g, {0.7, 0.0});
    const double total_mass = 0.7 * g.cell_area() * static_cast<double>(g.n_cells());
    const auto got = weighted_inner(ones, i_ones, w);
    CHECK(got.real() == doctest::Approx(0.0));
    CHECK(got.imag() == doctest::Approx(-total_mass));
}

TEST_CASE("inner product is conjugate-symmetric and positive on the diagonal") {
    Grid2D g = build_grid_with_half_width(5, 4, 2.0);
    GridField f(g), h(g), w(g);
    montecarlo::CounterRng rng(99, 1);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        f.values[i] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        h.values[i] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        w.values[i] = rng.uniform();
    }
    const auto fg = weighted_inner(f, h, w);
    const auto gf = weighted_inner(h, f, w);
    CHECK(fg.real() == doctest::Approx(gf.real()).epsilon(1e-13));
    CHECK(fg.imag() == doctest::Approx(-gf.imag()).epsilon(1e-13));
    const auto ff = weighted_inner(f, f, w);
    CHECK(ff.imag() == doctest::Approx(0.0));
    CHECK(ff.real() >= 0.0);
}

TEST_CASE("unit weight integrates the invariant density to one") {
    ModelParams p{0.5, 1.0, 0.2, 0.8};
    Grid2D g = build_grid(p, 64, 64, 5.0);
    GridField rho(g);
    for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
            rho.at(ix, iy) = model::stationary_density_xy(p, g.x(ix), g.y(iy));
    const auto mass = weighted_inner(constant_field(g), constant_field(g), rho);
    CHECK(mass.real() == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("mismatched grids are rejected") {
    Grid2D a = build_grid_with_half_width(4, 4, 1.0);
    Grid2D b = build_grid_with_half_width(5, 4, 1.0);
    CHECK_THROWS_AS(weighted_inner(GridField(a), GridField(b), GridField(a)), DimensionError);
}

TEST_CASE("field CSV is row-major with the documented header") {
    Grid2D g = build_grid_with_half_width(3, 2, 1.5);
    GridField f(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = {double(i), -double(i)};
    const std::string path = "test_field.csv";
    write_field_csv(f, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "ix,iy,x,y,re,im");
    std::getline(in, line);
    std::istringstream first(line);
    std::string cell;
    std::getline(first, cell, ',');
    CHECK(cell == "0");
    std::getline(first, cell, ',');
    CHECK(cell == "0");
    int rows = 0;
    do { ++rows; } while (std::getline(in, line));
    CHECK(rows == 6);
    std::remove(path.c_str());
}

TEST_SUITE_END();
