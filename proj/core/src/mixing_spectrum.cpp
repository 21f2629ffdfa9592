#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "hopfspec/detail/format.hpp"
#include "hopfspec/eigensolver.hpp"

namespace hopfspec::eigensolver {

namespace {

Eigen::SparseMatrix<double> to_eigen_shifted(const SparseOperator& op, double shift) {
    Eigen::SparseMatrix<double> m(op.n_rows(), op.n_cols());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(op.n_entries() + op.n_rows());
    for (int row = 0; row < op.n_rows(); ++row) {
        for (std::size_t k = op.row_offsets()[row]; k < op.row_offsets()[row + 1]; ++k) {
            trips.emplace_back(row, op.col_indices()[k], op.values()[k]);
        }
        trips.emplace_back(row, row, -shift);
    }
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

using SparseLU = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

// Ritz pairs of the operator, certified against the plain matvec. Shift-invert
// factorizes (A - sigma I) and maps the inverted Ritz values back.
std::vector<RitzPair> operator_eigs(const SparseOperator& op, int k,
                                    const ArnoldiOptions& opts, bool& converged) {
    const int n = op.n_rows();
    const MatVec plain = [&op](const double* x, double* y) { op.apply(x, y); };

    ArnoldiOptions local = opts;
    local.k = k;
    ArnoldiResult result;

    if (opts.selection == Selection::largest_magnitude_of_shift_inverted) {
        auto system = to_eigen_shifted(op, opts.shift);
        auto lu = std::make_shared<SparseLU>();
        lu->analyzePattern(system);
        lu->factorize(system);
        if (lu->info() != Eigen::Success) {
            throw NumericalError("shift-invert: LU factorization of (A - sigma I) failed");
        }
        const MatVec inverted = [lu, n](const double* x, double* y) {
            Eigen::Map<const Eigen::VectorXd> xv(x, n);
            Eigen::VectorXd sol = lu->solve(xv);
            Eigen::Map<Eigen::VectorXd>(y, n) = sol;
        };
        result = arnoldi_leading(inverted, n, local);
        for (auto& pair : result.pairs) {
            pair.value = opts.shift + 1.0 / pair.value;
            pair.residual = 0.0;  // recertified below against the plain operator
        }
    } else {
        result = arnoldi_leading(plain, n, local);
    }
    converged = result.converged;

    // Re-certify residuals against A and enforce conjugate closure.
    std::vector<RitzPair> pairs = std::move(result.pairs);
    std::vector<RitzPair> closed;
    for (auto& p : pairs) {
        if (p.value.imag() != 0.0) {
            const bool have_conj =
                std::any_of(pairs.begin(), pairs.end(), [&](const RitzPair& q) {
                    return std::abs(q.value - std::conj(p.value)) <
                           1e-10 * (1.0 + std::abs(p.value));
                });
            if (!have_conj) {
                RitzPair conj_pair;
                conj_pair.value = std::conj(p.value);
                conj_pair.vector.resize(p.vector.size());
                std::transform(p.vector.begin(), p.vector.end(), conj_pair.vector.begin(),
                               [](std::complex<double> v) { return std::conj(v); });
                closed.push_back(std::move(conj_pair));
            }
        }
    }
    pairs.insert(pairs.end(), std::make_move_iterator(closed.begin()),
                 std::make_move_iterator(closed.end()));

    for (auto& p : pairs) {
        std::vector<double> re(p.vector.size()), im(p.vector.size());
        for (std::size_t i = 0; i < p.vector.size(); ++i) {
            re[i] = p.vector[i].real();
            im[i] = p.vector[i].imag();
        }
        std::vector<double> are(re.size()), aim(im.size());
        op.apply(re.data(), are.data());
        op.apply(im.data(), aim.data());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < re.size(); ++i) {
            const std::complex<double> av{are[i], aim[i]};
            const std::complex<double> diff = av - p.value * p.vector[i];
            num += std::norm(diff);
            den += std::norm(p.vector[i]);
        }
        p.residual = std::sqrt(num / den);
    }

    std::sort(pairs.begin(), pairs.end(), [](const RitzPair& a, const RitzPair& b) {
        if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
        if (std::abs(a.value.imag()) != std::abs(b.value.imag()))
            return std::abs(a.value.imag()) < std::abs(b.value.imag());
        return a.value.imag() > b.value.imag();
    });
    return pairs;
}

GridField field_from_vector(const Grid2D& grid, const std::vector<std::complex<double>>& v) {
    GridField f(grid);
    f.values = v;
    return f;
}

} // namespace

std::vector<RitzPair> leading_eigenvalues(const fokker_planck::DiscretizedGenerator& gen,
                                          int k, const ArnoldiOptions& opts) {
    bool converged = false;
    auto pairs = operator_eigs(gen.generator, k, opts, converged);
    if (!converged && pairs.empty()) {
        throw NumericalError("leading_eigenvalues: no Ritz pair converged");
    }
    return pairs;
}

MixingSpectrum solve_mixing_spectrum(const fokker_planck::DiscretizedGenerator& gen, int k,
                                     const ArnoldiOptions& opts) {
    if (k < 2) throw ConfigError("solve_mixing_spectrum: k must be >= 2");
    const Grid2D& grid = gen.grid;
    const double cell = grid.cell_area();

    bool conv_k = false, conv_kstar = false;
    auto gen_pairs = operator_eigs(gen.generator, k, opts, conv_k);
    auto adj_pairs = operator_eigs(gen.adjoint, k, opts, conv_kstar);
    if (gen_pairs.size() < 2 || adj_pairs.size() < 2) {
        throw NumericalError("solve_mixing_spectrum: fewer than two converged pairs");
    }

    MixingSpectrum spectrum;
    spectrum.grid = grid;
    spectrum.params = gen.params;
    spectrum.fully_converged = conv_k && conv_kstar;

    // Invariant density: adjoint vector at the eigenvalue closest to zero.
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < adj_pairs.size(); ++i) {
        if (std::abs(adj_pairs[i].value) < std::abs(adj_pairs[i0].value)) i0 = i;
    }
    GridField density(grid);
    {
        double total = 0.0;
        for (std::size_t i = 0; i < density.values.size(); ++i) {
            total += adj_pairs[i0].vector[i].real();
        }
        const double sign = total >= 0.0 ? 1.0 : -1.0;
        double max_val = 0.0, min_val = 0.0;
        for (std::size_t i = 0; i < density.values.size(); ++i) {
            const double v = sign * adj_pairs[i0].vector[i].real();
            max_val = std::max(max_val, v);
            min_val = std::min(min_val, v);
            density.values[i] = v;
        }
        if (min_val < -1e-8 * max_val) spectrum.positivity_warning = true;
        double mass = 0.0;
        for (auto& v : density.values) {
            const double clipped = std::max(v.real(), 0.0);
            v = clipped;
            mass += clipped;
        }
        mass *= cell;
        if (mass <= 0.0) {
            throw NumericalError("solve_mixing_spectrum: null density has no positive mass");
        }
        for (auto& v : density.values) v /= mass;
    }
    spectrum.invariant_density = density;
    const double density_max =
        std::max_element(density.values.begin(), density.values.end(),
                         [](auto a, auto b) { return a.real() < b.real(); })
            ->real();
    const double clamp_floor = 1e-14 * density_max;

    // Generator pair with the largest real part is the invariant pair.
    std::size_t g0 = 0;
    for (std::size_t i = 1; i < gen_pairs.size(); ++i) {
        if (std::abs(gen_pairs[i].value) < std::abs(gen_pairs[g0].value)) g0 = i;
    }

    std::vector<bool> adj_used(adj_pairs.size(), false);
    adj_used[i0] = true;

    for (std::size_t i = 0; i < gen_pairs.size(); ++i) {
        EigenPair pair;
        pair.lambda = gen_pairs[i].value;
        pair.residual = gen_pairs[i].residual;

        if (i == g0) {
            pair.psi = constant_field(grid);
            GridField ratio(grid);
            int clamped = 0;
            for (std::size_t c = 0; c < ratio.values.size(); ++c) {
                const double rho = density.values[c].real();
                ratio.values[c] = rho < clamp_floor ? 0.0 : 1.0;
                if (rho < clamp_floor) ++clamped;
            }
            spectrum.clamped_cells = std::max(spectrum.clamped_cells, clamped);
            pair.psi_adjoint = std::move(ratio);
            spectrum.pairs.push_back(std::move(pair));
            continue;
        }

        // Match against the adjoint list at the conjugated eigenvalue.
        const std::complex<double> target = std::conj(pair.lambda);
        std::size_t best = adj_pairs.size();
        double best_dist = opts.match_tol;
        for (std::size_t a = 0; a < adj_pairs.size(); ++a) {
            if (adj_used[a]) continue;
            const double dist = std::abs(adj_pairs[a].value - target);
            if (dist <= best_dist) {
                best = a;
                best_dist = dist;
            }
        }
        if (best == adj_pairs.size()) {
            std::ostringstream msg;
            msg << "solve_mixing_spectrum: no adjoint eigenvalue within " << opts.match_tol
                << " of conj(" << pair.lambda.real() << (pair.lambda.imag() < 0 ? "" : "+")
                << pair.lambda.imag() << "i); residuals:";
            for (const auto& a : adj_pairs) msg << ' ' << a.residual;
            throw NumericalError(msg.str());
        }
        adj_used[best] = true;

        GridField psi = field_from_vector(grid, gen_pairs[i].vector);
        // Unit mu-norm, then canonical phase: largest-magnitude cell real positive.
        const double norm =
            std::sqrt(std::abs(weighted_inner(psi, psi, density)));
        if (norm == 0.0) throw NumericalError("solve_mixing_spectrum: zero eigenvector");
        std::size_t arg_max = 0;
        for (std::size_t c = 1; c < psi.values.size(); ++c) {
            if (std::abs(psi.values[c]) > std::abs(psi.values[arg_max])) arg_max = c;
        }
        const std::complex<double> phase =
            psi.values[arg_max] / std::abs(psi.values[arg_max]);
        const std::complex<double> rescale = 1.0 / (norm * phase);
        for (auto& v : psi.values) v *= rescale;

        GridField ratio(grid);
        int clamped = 0;
        for (std::size_t c = 0; c < ratio.values.size(); ++c) {
            const double rho = density.values[c].real();
            if (rho < clamp_floor) {
                ratio.values[c] = 0.0;
                ++clamped;
            } else {
                ratio.values[c] = adj_pairs[best].vector[c] / rho;
            }
        }
        spectrum.clamped_cells = std::max(spectrum.clamped_cells, clamped);

        const std::complex<double> pairing = weighted_inner(ratio, psi, density);
        if (std::abs(pairing) < 1e-12) {
            throw NumericalError(
                "solve_mixing_spectrum: degenerate biorthogonal pairing for lambda = " +
                detail::g17(pair.lambda.real()) + " + " + detail::g17(pair.lambda.imag()) +
                "i");
        }
        for (auto& v : ratio.values) v /= pairing;

        pair.psi = std::move(psi);
        pair.psi_adjoint = std::move(ratio);
        spectrum.pairs.push_back(std::move(pair));
    }

    std::sort(spectrum.pairs.begin(), spectrum.pairs.end(),
              [](const EigenPair& a, const EigenPair& b) {
                  if (a.lambda.real() != b.lambda.real())
                      return a.lambda.real() > b.lambda.real();
                  if (std::abs(a.lambda.imag()) != std::abs(b.lambda.imag()))
                      return std::abs(a.lambda.imag()) < std::abs(b.lambda.imag());
                  return a.lambda.imag() > b.lambda.imag();
              });
    return spectrum;
}

void write_spectrum_csv(const MixingSpectrum& spectrum, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_spectrum_csv: cannot open " + path);
    out << "j,re_lambda,im_lambda,residual\n";
    for (std::size_t j = 0; j < spectrum.pairs.size(); ++j) {
        const auto& p = spectrum.pairs[j];
        out << j << ',' << detail::g17(p.lambda.real()) << ','
            << detail::g17(p.lambda.imag()) << ',' << detail::g17(p.residual) << '\n';
    }
}

} // namespace hopfspec::eigensolver
