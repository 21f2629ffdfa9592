#pragma once

#include <cmath>

#include "hopfspec/errors.hpp"

namespace hopfspec {

/// Parameters of the stochastic Hopf normal form with additive Cartesian noise.
///
/// delta controls the bifurcation (stable focus for delta < 0, stable limit
/// cycle of radius sqrt(delta) for delta > 0), gamma is the base angular
/// frequency, beta the twist factor coupling angular frequency to radius,
/// and epsilon >= 0 the noise level.
struct ModelParams {
    double delta = 0.0;
    double gamma = 1.0;
    double beta = 0.0;
    double epsilon = 1.0;

    static constexpr double critical_delta = 0.0;

    void validate() const {
        if (!std::isfinite(delta) || !std::isfinite(gamma) || !std::isfinite(beta) ||
            !std::isfinite(epsilon)) {
            throw ConfigError("ModelParams: delta, gamma, beta, epsilon must be finite");
        }
        if (epsilon < 0.0) {
            throw ConfigError("ModelParams: epsilon must be >= 0");
        }
    }

    /// Angular frequency of the limit cycle, omega_f = gamma - beta * delta.
    double angular_frequency() const { return gamma - beta * delta; }

    /// Radius of the deterministic limit cycle (requires delta > 0).
    double cycle_radius() const {
        if (delta <= 0.0) {
            throw DomainError("cycle_radius: no limit cycle for delta <= 0");
        }
        return std::sqrt(delta);
    }

    /// Period of the limit cycle, T = 2*pi / omega_f (requires delta > 0).
    double cycle_period() const {
        if (delta <= 0.0) {
            throw DomainError("cycle_period: no limit cycle for delta <= 0");
        }
        return 2.0 * M_PI / angular_frequency();
    }
};

} // namespace hopfspec
