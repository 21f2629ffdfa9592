#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "hopfspec/eigensolver.hpp"
#include "hopfspec/fokker_planck.hpp"
#include "hopfspec/model.hpp"
#include "hopfspec/montecarlo.hpp"

using namespace hopfspec;
using eigensolver::ArnoldiOptions;
using eigensolver::Selection;

TEST_SUITE_BEGIN("eigensolver");

TEST_CASE("diagonal operator returns the rightmost diagonal entries") {
    const int n = 60;
    const auto matvec = [n](const double* x, double* y) {
        for (int i = 0; i < n; ++i) y[i] = -(i + 1.0) * x[i];
    };
    ArnoldiOptions opts;
    opts.k = 3;
    const auto result = eigensolver::arnoldi_leading(matvec, n, opts);
    REQUIRE(result.n_converged >= 3);
    CHECK(result.pairs[0].value.real() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(result.pairs[1].value.real() == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(result.pairs[2].value.real() == doctest::Approx(-3.0).epsilon(1e-9));
    for (const auto& p : result.pairs) CHECK(p.residual < 1e-8);
}

TEST_CASE("random nonnormal matrix against the dense QR oracle") {
    const int n = 12;
    Eigen::MatrixXd a(n, n);
    montecarlo::CounterRng rng(31337, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 2.0 * rng.uniform() - 1.0;
    // push the spectrum into the left half plane
    a -= 3.0 * Eigen::MatrixXd::Identity(n, n);

    Eigen::EigenSolver<Eigen::MatrixXd> dense(a);
    std::vector<std::complex<double>> exact(dense.eigenvalues().data(),
                                            dense.eigenvalues().data() + n);
    std::sort(exact.begin(), exact.end(), [](auto p, auto q) {
        if (p.real() != q.real()) return p.real() > q.real();
        return std::abs(p.imag()) < std::abs(q.imag());
    });

    const auto matvec = [&a, n](const double* x, double* y) {
        Eigen::Map<const Eigen::VectorXd> xv(x, n);
        Eigen::Map<Eigen::VectorXd>(y, n) = a * xv;
    };
    ArnoldiOptions opts;
    opts.k = 4;
    opts.tol = 1e-12;
    const auto result = eigensolver::arnoldi_leading(matvec, n, opts);
    REQUIRE(result.n_converged >= 4);
    for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(result.pairs[j].value - exact[j]) < 1e-8);
    }
}

TEST_CASE("deterministic given the fixed starting vector") {
    const int n = 40;
    const auto matvec = [n](const double* x, double* y) {
        for (int i = 0; i < n; ++i) {
            y[i] = -(i + 1.0) * x[i] + 0.3 * x[(i + 1) % n];
        }
    };
    ArnoldiOptions opts;
    opts.k = 4;
    const auto a = eigensolver::arnoldi_leading(matvec, n, opts);
    const auto b = eigensolver::arnoldi_leading(matvec, n, opts);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].value == b.pairs[i].value);
        CHECK(a.pairs[i].vector == b.pairs[i].vector);
    }
}

TEST_CASE("non-finite operator output raises a numerical error") {
    const int n = 30;
    const auto matvec = [n](const double* x, double* y) {
        for (int i = 0; i < n; ++i) y[i] = x[i];
        y[7] = std::numeric_limits<double>::quiet_NaN();
    };
    ArnoldiOptions opts;
    opts.k = 2;
    CHECK_THROWS_AS(eigensolver::arnoldi_leading(matvec, n, opts), NumericalError);
}

TEST_CASE("rightmost eigenvalue of a discretized generator is zero") {
    ModelParams p{0.5, 1.0, 0.3, 0.8};
    Grid2D grid = build_grid(p, 32, 32, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    ArnoldiOptions opts;
    opts.k = 4;
    opts.selection = Selection::largest_magnitude_of_shift_inverted;
    const auto pairs = eigensolver::leading_eigenvalues(gen, 4, opts);
    CHECK(std::abs(pairs[0].value) < 1e-8);
    for (const auto& pr : pairs) {
        CHECK(pr.value.real() <= opts.tol);
    }
}

TEST_CASE("mixing spectrum structure on a small grid") {
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, 48, 48, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    ArnoldiOptions opts;
    opts.k = 8;
    opts.selection = Selection::largest_magnitude_of_shift_inverted;
    const auto spec = eigensolver::solve_mixing_spectrum(gen, 8, opts);

    SUBCASE("invariant pair: lambda_0 = 0, constant eigenfunction, unit mass") {
        CHECK(std::abs(spec.pairs[0].lambda) < 1e-9);
        for (const auto& v : spec.pairs[0].psi.values) {
            CHECK(v.real() == doctest::Approx(1.0));
            CHECK(v.imag() == 0.0);
        }
        double mass = 0.0, min_val = 0.0;
        for (const auto& v : spec.invariant_density.values) {
            mass += v.real() * grid.cell_area();
            min_val = std::min(min_val, v.real());
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(min_val >= 0.0);
    }
    SUBCASE("sorted by descending real part, conjugates both present") {
        for (std::size_t j = 1; j < spec.pairs.size(); ++j) {
            CHECK(spec.pairs[j].lambda.real() <= spec.pairs[j - 1].lambda.real() + 1e-12);
        }
        for (const auto& pr : spec.pairs) {
            if (std::abs(pr.lambda.imag()) > 1e-10) {
                bool found = false;
                for (const auto& other : spec.pairs) {
                    if (std::abs(other.lambda - std::conj(pr.lambda)) < 1e-8) found = true;
                }
                CHECK(found);
            }
        }
    }
    SUBCASE("every eigenvalue respects the left-half-plane bound") {
        for (const auto& pr : spec.pairs) CHECK(pr.lambda.real() <= opts.tol);
    }
    SUBCASE("biorthogonal normalization within 1e-6") {
        for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
            for (std::size_t j = 0; j < spec.pairs.size(); ++j) {
                const auto ip = weighted_inner(spec.pairs[i].psi_adjoint, spec.pairs[j].psi,
                                               spec.invariant_density);
                const double expected = i == j ? 1.0 : 0.0;
                CHECK(std::abs(ip - std::complex<double>{expected, 0.0}) <= 1e-6);
            }
        }
    }
    SUBCASE("reported residuals certify outside the solver within 10x") {
        for (const auto& pr : spec.pairs) {
            std::vector<std::complex<double>> av = gen.generator.apply(pr.psi.values);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < av.size(); ++i) {
                num += std::norm(av[i] - pr.lambda * pr.psi.values[i]);
                den += std::norm(pr.psi.values[i]);
            }
            const double recomputed = std::sqrt(num / den);
            CHECK(recomputed <= 10.0 * std::max(pr.residual, 1e-15));
        }
    }
    SUBCASE("invariant density tracks the analytic stationary density") {
        GridField exact(grid);
        for (int iy = 0; iy < grid.ny(); ++iy)
            for (int ix = 0; ix < grid.nx(); ++ix)
                exact.at(ix, iy) = model::stationary_density_xy(p, grid.x(ix), grid.y(iy));
        CHECK(l1_distance(spec.invariant_density, exact) < 5e-3);
    }
}

TEST_CASE("plain largest-real-part selection agrees with shift-invert") {
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, 40, 40, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    ArnoldiOptions plain;
    plain.k = 5;
    plain.max_restarts = 4000;
    plain.selection = Selection::largest_real_part;
    ArnoldiOptions si;
    si.k = 5;
    si.selection = Selection::largest_magnitude_of_shift_inverted;
    const auto a = eigensolver::leading_eigenvalues(gen, 5, plain);
    const auto b = eigensolver::leading_eigenvalues(gen, 5, si);
    REQUIRE(a.size() >= 5);
    REQUIRE(b.size() >= 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(a[j].value - b[j].value) < 1e-6);
    }
}

TEST_CASE("an impossible matching tolerance raises a pairing error") {
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, 24, 24, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    ArnoldiOptions opts;
    opts.k = 4;
    opts.selection = Selection::largest_magnitude_of_shift_inverted;
    opts.match_tol = 1e-300;
    CHECK_THROWS_AS(eigensolver::solve_mixing_spectrum(gen, 4, opts), NumericalError);
}

TEST_CASE("k larger than the convergence budget yields the converged subset") {
    ModelParams p{-1.0, 1.0, 0.0, 1.0};
    Grid2D grid = build_grid(p, 32, 32, 5.0);
    const auto gen = fokker_planck::assemble(p, grid);
    const int n = gen.generator.n_rows();
    const auto matvec = [&gen](const double* x, double* y) { gen.generator.apply(x, y); };
    ArnoldiOptions opts;
    opts.k = 6;
    opts.max_restarts = 1;  // starve the iteration
    opts.selection = Selection::largest_real_part;
    const auto result = eigensolver::arnoldi_leading(matvec, n, opts);
    CHECK_FALSE(result.converged);
    CHECK(result.n_converged < 6);
    for (const auto& pr : result.pairs) CHECK(pr.residual < 1e-6);
}

TEST_SUITE_END();
