#include "hopfspec/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hopfspec/detail/format.hpp"

namespace hopfspec::analytic {

namespace {

constexpr double two_pi = 2.0 * M_PI;

double norm_ratio_sqrt(int num, int den) {
    // sqrt(num! / den!) via log-gamma, safe for moderate indices.
    return std::exp(0.5 * (std::lgamma(num + 1.0) - std::lgamma(den + 1.0)));
}

const char* family_name(Family f) {
    switch (f) {
        case Family::stable_point: return "stable_point";
        case Family::unstable_point: return "unstable_point";
        case Family::limit_cycle: return "limit_cycle";
    }
    return "?";
}

void sort_pairs(std::vector<AnalyticEigenpair>& pairs) {
    std::sort(pairs.begin(), pairs.end(),
              [](const AnalyticEigenpair& a, const AnalyticEigenpair& b) {
                  if (a.lambda.real() != b.lambda.real())
                      return a.lambda.real() > b.lambda.real();
                  return std::abs(a.lambda.imag()) < std::abs(b.lambda.imag());
              });
}

} // namespace

double hermite(int l, double x) {
    if (l < 0) throw DomainError("hermite: degree must be >= 0");
    if (l == 0) return 1.0;
    double h_prev = 1.0;
    double h = 2.0 * x;
    for (int k = 1; k < l; ++k) {
        const double h_next = 2.0 * x * h - 2.0 * k * h_prev;
        h_prev = h;
        h = h_next;
    }
    return h;
}

double laguerre(int l, int alpha, double x) {
    if (l < 0) throw DomainError("laguerre: degree must be >= 0");
    if (alpha < 0) throw DomainError("laguerre: alpha must be >= 0");
    if (l == 0) return 1.0;
    double p_prev = 1.0;
    double p = 1.0 + alpha - x;
    for (int k = 1; k < l; ++k) {
        const double p_next = ((2.0 * k + 1.0 + alpha - x) * p - (k + alpha) * p_prev) /
                              (k + 1.0);
        p_prev = p;
        p = p_next;
    }
    return p;
}

AnalyticSpectrum subcritical_spectrum(const ModelParams& params, int l_max, int n_max) {
    params.validate();
    if (params.delta >= 0.0) {
        throw DomainError("subcritical_spectrum: requires delta < 0");
    }
    if (params.epsilon <= 0.0) {
        throw DomainError("subcritical_spectrum: requires epsilon > 0");
    }
    const double delta = params.delta;
    const double gamma = params.gamma;
    const double eps2 = params.epsilon * params.epsilon;
    const double scale = std::sqrt(-delta) / params.epsilon;  // radial argument scale
    // Stationary density of the linearized process, per unit area.
    const auto rho_point = [delta, eps2](double r) {
        return -delta / (M_PI * eps2) * std::exp(delta * r * r / eps2);
    };

    AnalyticSpectrum out;
    out.decorrelation_time = -1.0 / delta;
    for (int l = 0; l <= l_max; ++l) {
        for (int n = 0; n <= n_max; ++n) {
            AnalyticEigenpair pair;
            pair.family = Family::stable_point;
            pair.l = l;
            pair.n = n;
            pair.lambda = {(l + n) * delta, (n - l) * gamma};

            const int lo = std::min(l, n), hi = std::max(l, n);
            const int harmonic = n - l;    // sign carries the rotation direction
            const double prefactor = norm_ratio_sqrt(lo, hi);
            auto psi = [scale, eps2, delta, lo, hi, harmonic,
                        prefactor](double r, double theta) -> std::complex<double> {
                const double radial = prefactor * std::pow(scale * r, hi - lo) *
                                      laguerre(lo, hi - lo, -delta * r * r / eps2);
                return std::polar(1.0, harmonic * theta) * radial;
            };
            pair.eigenfunction = psi;
            pair.adjoint_eigenfunction = [psi, rho_point](double r,
                                                          double theta) -> std::complex<double> {
                return psi(r, theta) * rho_point(r);
            };
            out.pairs.push_back(std::move(pair));
        }
    }
    sort_pairs(out.pairs);
    return out;
}

AnalyticSpectrum supercritical_spectrum(const ModelParams& params, int l_max, int n_max) {
    params.validate();
    if (params.delta <= 0.0) {
        throw DomainError("supercritical_spectrum: requires delta > 0");
    }
    if (params.epsilon <= 0.0) {
        throw DomainError("supercritical_spectrum: requires epsilon > 0");
    }
    const double delta = params.delta;
    const double gamma = params.gamma;
    const double beta = params.beta;
    const double eps = params.epsilon;
    const double eps2 = eps * eps;
    const double omega = params.angular_frequency();
    const double sqrt_delta = std::sqrt(delta);
    const double hermite_scale = std::sqrt(2.0 * delta) / eps;
    // Gaussian ring density about the cycle, per unit area.
    const auto rho_cycle = [delta, eps2, sqrt_delta](double r) {
        const double dr = r - sqrt_delta;
        return 1.0 / (two_pi * std::max(r, 1e-300)) *
               std::sqrt(2.0 * delta / (M_PI * eps2)) *
               std::exp(-2.0 * delta * dr * dr / eps2);
    };

    AnalyticSpectrum out;
    out.decorrelation_time = 2.0 * delta / (eps2 * (1.0 + beta * beta));

    for (int l = 0; l <= l_max; ++l) {
        for (int n = -n_max; n <= n_max; ++n) {
            AnalyticEigenpair pair;
            pair.family = Family::limit_cycle;
            pair.l = l;
            pair.n = n;
            if (l == 0) {
                pair.lambda = {-n * n * eps2 * (1.0 + beta * beta) / (2.0 * delta),
                               n * omega};
            } else {
                pair.lambda = {-2.0 * l * delta, n * omega};
            }
            const double prefactor =
                1.0 / std::sqrt(std::pow(2.0, l) * std::tgamma(l + 1.0));
            auto psi = [prefactor, l, n, beta, sqrt_delta,
                        hermite_scale](double r, double theta) -> std::complex<double> {
                const double phase = n * (theta - beta * std::log(r / sqrt_delta));
                const double radial =
                    prefactor * hermite(l, hermite_scale * (r - sqrt_delta));
                return std::polar(radial, phase);
            };
            pair.eigenfunction = psi;
            pair.adjoint_eigenfunction = [psi, rho_cycle](double r,
                                                          double theta) -> std::complex<double> {
                return psi(r, theta) * rho_cycle(r);
            };
            out.pairs.push_back(std::move(pair));
        }
    }

    // Repeller family at the origin: eigenvalues only, the expansion does not
    // provide usable eigenfunctions at this order.
    for (int l = 0; l <= l_max; ++l) {
        for (int n = 0; n <= n_max; ++n) {
            AnalyticEigenpair pair;
            pair.family = Family::unstable_point;
            pair.l = l;
            pair.n = n;
            pair.lambda = {-(l + n + 2.0) * delta, -(l - n) * gamma};
            out.pairs.push_back(std::move(pair));
        }
    }
    sort_pairs(out.pairs);
    return out;
}

GridField evaluate_eigenfield(const AnalyticEigenpair& pair, const Grid2D& grid) {
    if (!pair.eigenfunction) {
        throw ConfigError("evaluate_eigenfield: eigenpair carries no eigenfunction");
    }
    GridField field(grid);
    for (int iy = 0; iy < grid.ny(); ++iy) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const double x = grid.x(ix), y = grid.y(iy);
            const double r = std::hypot(x, y);
            if (r == 0.0) {
                throw ConfigError("evaluate_eigenfield: cell center at the origin");
            }
            field.at(ix, iy) = pair.eigenfunction(r, std::atan2(y, x));
        }
    }
    return field;
}

GridField evaluate_adjoint_eigenfield(const AnalyticEigenpair& pair, const Grid2D& grid) {
    if (!pair.adjoint_eigenfunction) {
        throw ConfigError("evaluate_adjoint_eigenfield: eigenpair carries no adjoint");
    }
    GridField field(grid);
    for (int iy = 0; iy < grid.ny(); ++iy) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const double x = grid.x(ix), y = grid.y(iy);
            const double r = std::hypot(x, y);
            if (r == 0.0) {
                throw ConfigError("evaluate_adjoint_eigenfield: cell center at the origin");
            }
            field.at(ix, iy) = pair.adjoint_eigenfunction(r, std::atan2(y, x));
        }
    }
    return field;
}

void write_analytic_csv(const AnalyticSpectrum& spectrum, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_analytic_csv: cannot open " + path);
    out << "family,l,n,re_lambda,im_lambda\n";
    for (const auto& p : spectrum.pairs) {
        out << family_name(p.family) << ',' << p.l << ',' << p.n << ','
            << detail::g17(p.lambda.real()) << ',' << detail::g17(p.lambda.imag()) << '\n';
    }
}

} // namespace hopfspec::analytic
