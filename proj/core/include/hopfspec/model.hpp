#pragma once

#include <array>
#include <functional>

#include "hopfspec/params.hpp"

namespace hopfspec::model {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Deterministic drift of the stochastic Hopf equation in Cartesian coordinates.
Vec2 drift_cartesian(const ModelParams& params, double x, double y);

/// Polar drift (dr/dt, dtheta/dt) including the Ito correction epsilon^2/(2r).
/// Requires r > 0.
Vec2 drift_polar(const ModelParams& params, double r);

/// Stationary density in polar coordinates (r, theta): probability per dr dtheta,
/// rho(r) = (N / 2pi) * r * exp(delta r^2/eps^2 - r^4/(2 eps^2)), normalized so
/// that the integral over (0,inf) x (0,2pi) is 1. Requires epsilon > 0, r >= 0.
double stationary_density(const ModelParams& params, double r);

/// Stationary density per unit area at the Cartesian point (x, y); this is
/// stationary_density / r, finite at the origin. Integral over the plane is 1.
double stationary_density_xy(const ModelParams& params, double x, double y);

/// sqrt(E[x^2]) under the stationary measure, by 1D quadrature of the radial
/// density (E[x^2] = E[y^2] = E[r^2]/2 by rotational symmetry).
double estimate_sigma_hat(const ModelParams& params);

/// Asymptotic phase phi(r, theta), wrapped to [0, 2pi). Requires r > 0.
/// delta > 0: phi = theta - beta log(r/sqrt(delta));
/// delta = 0: phi = theta - beta log r;
/// delta < 0: phi = theta - beta log sqrt(r^2 - delta) + beta log sqrt(|delta|).
double asymptotic_phase(const ModelParams& params, double r, double theta);

/// Unwrapped asymptotic phase (no modular reduction), for phase-diffusion tracking.
double asymptotic_phase_unwrapped(const ModelParams& params, double r, double theta);

/// Floquet structure of the limit cycle (delta > 0), in the co-moving polar
/// frame at theta0 = 0. Right/left eigenvectors are given in polar components.
struct FloquetData {
    double period = 0.0;                      // T = 2pi/omega_f
    Mat2 R{};                                 // constant Floquet matrix (Cartesian frame at theta0)
    std::array<double, 2> exponents{};        // (-2 delta, 0)
    Vec2 e1{}, e2{};                          // right eigenvectors, polar components
    Vec2 f1{}, f2{};                          // left eigenvectors, polar components
    double omega = 0.0;

    /// Periodic factor Z(t) (a rotation by omega*t).
    Mat2 Z(double t) const;
    /// Fundamental matrix M(t) = Z(t) exp(t R).
    Mat2 M(double t) const;
    /// Characteristic multipliers, eigenvalues of exp(T R).
    std::array<double, 2> multipliers() const;
};

FloquetData floquet_data(const ModelParams& params);

/// Phase-diffusion coefficient Phi by Simpson quadrature of the periodic-OU
/// correlation matrix over one period, contracted with the neutral left
/// Floquet vector. Equals -eps^2 (1+beta^2)/delta for the isotropic noise of
/// the stochastic Hopf equation. Requires delta > 0.
double phase_diffusion_coefficient(const ModelParams& params);

/// Same quadrature with an explicit noise covariance in polar components
/// (diffusion_polar = D_Gamma evaluated on the cycle). The default above uses
/// diag(1, 1/delta). Radial-only forcing corresponds to diag(1, 0).
double phase_diffusion_coefficient(const ModelParams& params, const Mat2& diffusion_polar);

/// Closed-form Lie bracket [V0, V1] for constant radial forcing V1 = sigma d_r,
/// in polar components: (-sigma (delta - 3 r^2), -2 sigma beta r). Requires r > 0.
Vec2 lie_bracket_radial(const ModelParams& params, double sigma, double r);

/// Stochastic forcing field in polar components, evaluable for r > 0.
struct ForcingField {
    enum class Kind { radial_constant, azimuthal_constant, general };

    Kind kind = Kind::radial_constant;
    double sigma = 1.0;
    std::function<Vec2(double r, double theta)> field;  // used when kind == general

    Vec2 evaluate(double r, double theta) const;

    static ForcingField radial(double sigma);
    static ForcingField azimuthal(double sigma);
    static ForcingField general(std::function<Vec2(double, double)> f);
    /// Field tangent to the isochrons, s(r) * (1, beta/r); requires delta > 0
    /// only in the sense that isochrons of the cycle are meant.
    static ForcingField isochron_tangent(const ModelParams& params, double sigma);
};

/// Rank (1 or 2) of the space spanned at (r, theta) by the iterated Lie
/// brackets of the drift with the forcing field, built numerically with
/// central-difference Jacobians up to the given depth.
int hormander_rank(const ModelParams& params, const ForcingField& forcing, double r,
                   double theta, int depth);

/// Radial potential U(r) = -delta r^2/2 + r^4/4 (integration constant fixed to 0).
double potential(const ModelParams& params, double r);

} // namespace hopfspec::model
