#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hopfspec/grid.hpp"
#include "hopfspec/params.hpp"

namespace hopfspec::analytic {

/// Physicists' Hermite polynomial H_l(x) by the three-term recurrence.
double hermite(int l, double x);

/// Generalized Laguerre polynomial L_l^alpha(x) by recurrence (alpha >= 0).
double laguerre(int l, int alpha, double x);

enum class Family { stable_point, unstable_point, limit_cycle };

/// One small-noise eigenpair: eigenvalue plus callable eigenfunction and
/// adjoint eigenfunction in polar coordinates. Adjoint callables include the
/// stationary-density weight, expressed per unit area, so that flat grid
/// inner products (cell area measure) realize the biorthogonal pairing.
struct AnalyticEigenpair {
    Family family = Family::stable_point;
    int l = 0;
    int n = 0;
    std::complex<double> lambda{0.0, 0.0};
    std::function<std::complex<double>(double r, double theta)> eigenfunction;
    std::function<std::complex<double>(double r, double theta)> adjoint_eigenfunction;
};

struct AnalyticSpectrum {
    std::vector<AnalyticEigenpair> pairs;
    double decorrelation_time = 0.0;
};

/// Small-noise spectrum below the bifurcation (delta < 0, epsilon > 0):
/// triangular family lambda_ln = (l+n) delta + i (n-l) gamma for
/// 0 <= l <= l_max, 0 <= n <= n_max, with Laguerre-harmonic eigenfunctions.
/// Exposes the decorrelation time tau = -1/delta.
AnalyticSpectrum subcritical_spectrum(const ModelParams& params, int l_max, int n_max);

/// Small-noise spectrum above the bifurcation (delta > 0, epsilon > 0):
/// limit-cycle family (0 <= l <= l_max, |n| <= n_max) plus the unstable-point
/// triangular family (0 <= l, n and l + n <= max(l_max, n_max)).
/// Exposes tau = 2 delta / (eps^2 (1 + beta^2)).
AnalyticSpectrum supercritical_spectrum(const ModelParams& params, int l_max, int n_max);

/// Sample an eigenfunction at the cell centers of a grid.
GridField evaluate_eigenfield(const AnalyticEigenpair& pair, const Grid2D& grid);

/// Same for the adjoint eigenfunction.
GridField evaluate_adjoint_eigenfield(const AnalyticEigenpair& pair, const Grid2D& grid);

/// CSV export, header "family,l,n,re_lambda,im_lambda".
void write_analytic_csv(const AnalyticSpectrum& spectrum, const std::string& path);

} // namespace hopfspec::analytic
