#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hopfspec/fokker_planck.hpp"
#include "hopfspec/grid.hpp"
#include "hopfspec/sparse_operator.hpp"

namespace hopfspec::eigensolver {

enum class Selection { largest_real_part, largest_magnitude_of_shift_inverted };

struct ArnoldiOptions {
    int k = 10;                 // requested eigenpairs
    int m = 0;                  // Krylov dimension; 0 -> max(2k + 8, 40)
    double tol = 1e-8;          // relative Ritz residual tolerance
    int max_restarts = 500;
    Selection selection = Selection::largest_real_part;
    double shift = 0.1;         // sigma for shift-invert
    double match_tol = 1e-6;    // eigenvalue matching between K and K* lists

    int krylov_dim() const { return m > 0 ? m : std::max(2 * k + 8, 40); }
};

struct RitzPair {
    std::complex<double> value;
    std::vector<std::complex<double>> vector;
    double residual = 0.0;      // ||A v - lambda v|| / ||v||
};

struct ArnoldiResult {
    std::vector<RitzPair> pairs;   // sorted by the selection criterion
    int n_converged = 0;
    bool converged = false;        // n_converged >= k
    int iterations = 0;            // Arnoldi update iterations taken
};

using MatVec = std::function<void(const double* in, double* out)>;

/// Leading Ritz pairs of a real linear operator by implicitly restarted
/// Arnoldi. Deterministic: the starting vector is the normalized all-ones
/// vector. Residuals are recomputed outside the iteration against `matvec`.
/// Throws NumericalError if the operator produces non-finite values; on
/// non-convergence returns the converged subset with converged = false.
ArnoldiResult arnoldi_leading(const MatVec& matvec, int n, const ArnoldiOptions& opts);

/// One matched eigentriple of the discretized Kolmogorov operator.
struct EigenPair {
    std::complex<double> lambda;
    GridField psi;          // eigenfunction of K, psi_0 is constant 1
    GridField psi_adjoint;  // density ratio rho_j / rho_inf, <psi*_j, psi_j>_mu = 1
    double residual = 0.0;
};

struct MixingSpectrum {
    std::vector<EigenPair> pairs;   // descending real part, ties by ascending |Im|
    GridField invariant_density;    // real, nonnegative, mass 1
    Grid2D grid;
    ModelParams params;
    int clamped_cells = 0;          // cells where rho_inf was clamped in the ratio
    bool positivity_warning = false;
    bool fully_converged = true;
};

/// Eigenvalues (and vectors) of K and K* matched into biorthogonally
/// normalized triples. Runs Arnoldi on both operators, pairs the lists by
/// conjugated eigenvalue within match_tol, divides the adjoint densities by
/// the invariant density, and normalizes <psi*_j, psi_j>_mu = 1.
MixingSpectrum solve_mixing_spectrum(const fokker_planck::DiscretizedGenerator& gen, int k,
                                     const ArnoldiOptions& opts);

/// Leading eigenvalues of the generator only (no adjoint solve, no matching);
/// the cheap path for parameter sweeps.
std::vector<RitzPair> leading_eigenvalues(const fokker_planck::DiscretizedGenerator& gen,
                                          int k, const ArnoldiOptions& opts);

/// CSV export, header "j,re_lambda,im_lambda,residual".
void write_spectrum_csv(const MixingSpectrum& spectrum, const std::string& path);

} // namespace hopfspec::eigensolver
