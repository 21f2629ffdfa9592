#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hopfspec/eigensolver.hpp"
#include "hopfspec/grid.hpp"

namespace hopfspec::spectral {

enum class SeriesKind { correlation, power };

/// A sampled correlation function or power spectrum together with the
/// decomposition weights that produced it. Power values live in the real
/// parts; correlation values are complex with tiny imaginary parts for real
/// observables.
struct SpectralSeries {
    SeriesKind kind = SeriesKind::correlation;
    std::vector<double> abscissa;                 // lags t or angular frequencies z
    std::vector<std::complex<double>> values;
    std::vector<std::complex<double>> weights;    // w_j actually used, j >= 1
    int truncated_pairs = 0;                      // number of pairs entering the sum
};

/// Decomposition weights w_j = <f, psi_j>_mu <psi*_j, g>_mu against the
/// invariant density, for j >= 1 (entry 0, the invariant pair, is set to 0:
/// the mean product is subtracted in the correlation definition).
/// f and g must be real fields on the spectrum's grid.
std::vector<std::complex<double>> spectral_weights(const eigensolver::MixingSpectrum& spectrum,
                                                   const GridField& f, const GridField& g);

/// C(t) = sum_{j>=1} exp(lambda_j t) w_j over the converged pairs, on an
/// ascending nonnegative time grid.
SpectralSeries reconstruct_correlation(const eigensolver::MixingSpectrum& spectrum,
                                       const GridField& f, const GridField& g,
                                       const std::vector<double>& t_grid);

/// Lorentzian decomposition of the power spectrum on a user frequency grid,
/// S(z) = sum_{j>=1} [-Re(lambda_j) Re(w_j) + (z - Im(lambda_j)) Im(w_j)]
///        / (pi ((z - Im lambda_j)^2 + (Re lambda_j)^2)).
/// Eigenvalues with zero real part (other than the excluded invariant pair)
/// raise a singular-term error.
SpectralSeries reconstruct_power_spectrum(const eigensolver::MixingSpectrum& spectrum,
                                          const GridField& f, const GridField& g,
                                          const std::vector<double>& z_grid);

/// Named monomial observables evaluated on the grid: "x", "y", "x2", "x3", "r2".
GridField monomial_observable(const Grid2D& grid, const std::string& name);

/// CSV "t,re_C,im_C" for correlations, "z,S" for power spectra.
void write_series_csv(const SpectralSeries& series, const std::string& path);

} // namespace hopfspec::spectral
