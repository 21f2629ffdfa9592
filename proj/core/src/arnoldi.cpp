#include <arpack/arpack.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <string>
#include <vector>

#include "hopfspec/eigensolver.hpp"
#include "hopfspec/errors.hpp"

namespace hopfspec::eigensolver {

namespace {

// The reverse-communication routines keep SAVE'd internal state, so two
// interleaved sessions corrupt each other. One session at a time, process-wide;
// callers from several threads queue here.
std::mutex arpack_mutex;

void check_finite(const double* y, int n) {
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(y[i])) {
            throw NumericalError("arnoldi: operator produced a non-finite value");
        }
    }
}

double complex_residual(const MatVec& matvec, const std::vector<std::complex<double>>& v,
                        std::complex<double> lambda, int n) {
    std::vector<double> re(n), im(n), are(n), aim(n);
    for (int i = 0; i < n; ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
    }
    matvec(re.data(), are.data());
    matvec(im.data(), aim.data());
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> av{are[i], aim[i]};
        const std::complex<double> diff = av - lambda * v[i];
        num += std::norm(diff);
        den += std::norm(v[i]);
    }
    return std::sqrt(num / den);
}

} // namespace

ArnoldiResult arnoldi_leading(const MatVec& matvec, int n, const ArnoldiOptions& opts) {
    if (opts.k < 1) throw ConfigError("arnoldi_leading: k must be >= 1");
    const int nev = opts.k;
    int ncv = std::min(std::max(opts.krylov_dim(), nev + 3), n);
    if (nev + 2 > ncv) {
        throw ConfigError("arnoldi_leading: operator dimension too small for requested k");
    }

    const char* which =
        opts.selection == Selection::largest_real_part ? "LR" : "LM";

    std::lock_guard<std::mutex> session_lock(arpack_mutex);

    a_int ido = 0;
    a_int info = 1;  // user-supplied start vector
    std::vector<double> resid(static_cast<std::size_t>(n),
                              1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> v(static_cast<std::size_t>(n) * ncv);
    std::vector<double> workd(3 * static_cast<std::size_t>(n));
    const a_int lworkl = 3 * ncv * ncv + 6 * ncv;
    std::vector<double> workl(static_cast<std::size_t>(lworkl));
    a_int iparam[11] = {0};
    a_int ipntr[14] = {0};
    iparam[0] = 1;                 // exact shifts
    iparam[2] = opts.max_restarts; // max Arnoldi update iterations
    iparam[3] = 1;
    iparam[6] = 1;                 // standard eigenproblem, OP = A

    while (true) {
        dnaupd_c(&ido, "I", n, which, nev, opts.tol, resid.data(), ncv, v.data(), n,
                 iparam, ipntr, workd.data(), workl.data(), lworkl, &info);
        if (ido == -1 || ido == 1) {
            const double* x = workd.data() + (ipntr[0] - 1);
            double* y = workd.data() + (ipntr[1] - 1);
            matvec(x, y);
            check_finite(y, n);
        } else {
            break;
        }
    }
    if (info < 0) {
        throw NumericalError("arnoldi_leading: dnaupd error " + std::to_string(info));
    }

    std::vector<a_int> select(static_cast<std::size_t>(ncv), 1);
    std::vector<double> dr(static_cast<std::size_t>(nev) + 1);
    std::vector<double> di(static_cast<std::size_t>(nev) + 1);
    std::vector<double> z(static_cast<std::size_t>(n) * (nev + 1));
    std::vector<double> workev(3 * static_cast<std::size_t>(ncv));
    a_int info_e = 0;
    dneupd_c(1, "A", select.data(), dr.data(), di.data(), z.data(), n, 0.0, 0.0,
             workev.data(), "I", n, which, nev, opts.tol, resid.data(), ncv, v.data(), n,
             iparam, ipntr, workd.data(), workl.data(), lworkl, &info_e);
    if (info_e == -14) {
        // No Ritz value reached the requested accuracy: empty partial result.
        ArnoldiResult empty;
        empty.iterations = static_cast<int>(iparam[2]);
        return empty;
    }
    if (info_e < 0) {
        throw NumericalError("arnoldi_leading: dneupd error " + std::to_string(info_e));
    }

    const int nconv = static_cast<int>(iparam[4]);
    ArnoldiResult result;
    result.n_converged = nconv;
    result.converged = nconv >= nev;
    result.iterations = static_cast<int>(iparam[2]);

    // Unpack the real-packed Ritz vectors; complex pairs occupy two columns.
    int j = 0;
    while (j < nconv) {
        if (di[j] == 0.0) {
            RitzPair pair;
            pair.value = {dr[j], 0.0};
            pair.vector.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) pair.vector[i] = z[static_cast<std::size_t>(j) * n + i];
            result.pairs.push_back(std::move(pair));
            ++j;
        } else {
            RitzPair plus, minus;
            plus.value = {dr[j], std::abs(di[j])};
            minus.value = std::conj(plus.value);
            plus.vector.resize(static_cast<std::size_t>(n));
            minus.vector.resize(static_cast<std::size_t>(n));
            const double* zr = &z[static_cast<std::size_t>(j) * n];
            const double* zi = (j + 1 < nev + 1) ? &z[(static_cast<std::size_t>(j) + 1) * n]
                                                 : nullptr;
            for (int i = 0; i < n; ++i) {
                const double imag = zi ? zi[i] : 0.0;
                plus.vector[i] = {zr[i], imag};
                minus.vector[i] = {zr[i], -imag};
            }
            result.pairs.push_back(std::move(plus));
            if (j + 1 < nconv) result.pairs.push_back(std::move(minus));
            j += 2;
        }
    }

    for (auto& pair : result.pairs) {
        pair.residual = complex_residual(matvec, pair.vector, pair.value, n);
    }

    std::sort(result.pairs.begin(), result.pairs.end(), [&](const RitzPair& a,
                                                            const RitzPair& b) {
        if (opts.selection == Selection::largest_real_part) {
            if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
            if (std::abs(a.value.imag()) != std::abs(b.value.imag()))
                return std::abs(a.value.imag()) < std::abs(b.value.imag());
            return a.value.imag() > b.value.imag();
        }
        if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
        return a.value.imag() > b.value.imag();
    });
    return result;
}

} // namespace hopfspec::eigensolver
