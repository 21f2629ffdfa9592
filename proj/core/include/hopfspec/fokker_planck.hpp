#pragma once

#include <functional>
#include <string>

#include "hopfspec/grid.hpp"
#include "hopfspec/params.hpp"
#include "hopfspec/sparse_operator.hpp"

namespace hopfspec::fokker_planck {

/// Discretized Kolmogorov operator pair on a grid. `adjoint` acts on
/// cell-averaged densities (probability per unit area); `generator` is its
/// transpose and acts on observables. Columns of `adjoint` sum to zero and
/// its off-diagonal entries are nonnegative (generator / Metzler structure).
struct DiscretizedGenerator {
    SparseOperator adjoint;
    SparseOperator generator;
    Grid2D grid;
    ModelParams params;
};

/// Exponentially fitted (Chang-Cooper) finite-difference assembly of the
/// Fokker-Planck operator with no-flux boundaries, dimension-split on cell
/// faces with face drift averaged from the adjacent cell centers.
/// Requires epsilon > 0 and nx, ny >= 3.
DiscretizedGenerator assemble(const ModelParams& params, const Grid2D& grid);

/// Same scheme with an arbitrary drift field (x, y) -> (Fx, Fy) and constant
/// isotropic diffusion eps^2/2; used for linearized-drift checks.
DiscretizedGenerator assemble_with_drift(
    const Grid2D& grid, const std::function<std::array<double, 2>(double, double)>& drift,
    double epsilon, const ModelParams& params_for_record);

/// Chang-Cooper face weight w(P) = 1/(1 - exp(-P)) - 1/P, with the stable
/// small-|P| series. Exposed for tests of the central-differencing limit.
double chang_cooper_weight(double peclet);

/// Sparse matrix-vector product returning a field on the same grid.
GridField apply(const SparseOperator& op, const GridField& field);

/// One implicit Euler step: solves (I - dt K*) rho_new = rho with a
/// diagonally preconditioned BiCGSTAB at 1e-10 relative residual.
GridField implicit_step(const DiscretizedGenerator& gen, const GridField& density, double dt);

/// Coordinate-format export of the adjoint plus a JSON sidecar with grid metadata.
void export_matrix(const DiscretizedGenerator& gen, const std::string& matrix_path,
                   const std::string& sidecar_path);

} // namespace hopfspec::fokker_planck
