#include "hopfspec/spectral.hpp"

#include <cmath>
#include <fstream>

#include "hopfspec/detail/format.hpp"

namespace hopfspec::spectral {

namespace {

void require_real_field(const GridField& f, const char* who) {
    double max_abs = 0.0, max_imag = 0.0;
    for (const auto& v : f.values) {
        max_abs = std::max(max_abs, std::abs(v));
        max_imag = std::max(max_imag, std::abs(v.imag()));
    }
    if (max_imag > 1e-12 * std::max(max_abs, 1.0)) {
        throw ConfigError(std::string(who) + ": observables must be real-valued fields");
    }
}

} // namespace

std::vector<std::complex<double>> spectral_weights(const eigensolver::MixingSpectrum& spectrum,
                                                   const GridField& f, const GridField& g) {
    if (!f.grid.same_layout(spectrum.grid) || !g.grid.same_layout(spectrum.grid)) {
        throw DimensionError("spectral_weights: observable grid does not match the spectrum");
    }
    require_real_field(f, "spectral_weights");
    require_real_field(g, "spectral_weights");

    std::vector<std::complex<double>> weights(spectrum.pairs.size(), {0.0, 0.0});
    for (std::size_t j = 0; j < spectrum.pairs.size(); ++j) {
        const auto& pair = spectrum.pairs[j];
        if (j == 0 || std::abs(pair.lambda) == 0.0) continue;  // invariant pair excluded
        const std::complex<double> left =
            weighted_inner(f, pair.psi, spectrum.invariant_density);
        const std::complex<double> right =
            weighted_inner(pair.psi_adjoint, g, spectrum.invariant_density);
        weights[j] = left * right;
    }
    return weights;
}

SpectralSeries reconstruct_correlation(const eigensolver::MixingSpectrum& spectrum,
                                       const GridField& f, const GridField& g,
                                       const std::vector<double>& t_grid) {
    if (spectrum.pairs.empty()) {
        throw ConfigError("reconstruct_correlation: empty spectrum");
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] < t_grid[i - 1])) {
            throw ConfigError("reconstruct_correlation: t_grid must be nonnegative ascending");
        }
    }
    SpectralSeries series;
    series.kind = SeriesKind::correlation;
    series.abscissa = t_grid;
    series.weights = spectral_weights(spectrum, f, g);
    series.values.assign(t_grid.size(), {0.0, 0.0});
    int used = 0;
    for (std::size_t j = 1; j < spectrum.pairs.size(); ++j) {
        if (series.weights[j] == std::complex<double>{0.0, 0.0}) continue;
        ++used;
        const std::complex<double> lambda = spectrum.pairs[j].lambda;
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            series.values[i] += std::exp(lambda * t_grid[i]) * series.weights[j];
        }
    }
    series.truncated_pairs = used;
    return series;
}

SpectralSeries reconstruct_power_spectrum(const eigensolver::MixingSpectrum& spectrum,
                                          const GridField& f, const GridField& g,
                                          const std::vector<double>& z_grid) {
    if (spectrum.pairs.empty()) {
        throw ConfigError("reconstruct_power_spectrum: empty spectrum");
    }
    SpectralSeries series;
    series.kind = SeriesKind::power;
    series.abscissa = z_grid;
    series.weights = spectral_weights(spectrum, f, g);
    series.values.assign(z_grid.size(), {0.0, 0.0});
    int used = 0;
    for (std::size_t j = 1; j < spectrum.pairs.size(); ++j) {
        if (series.weights[j] == std::complex<double>{0.0, 0.0}) continue;
        const std::complex<double> lambda = spectrum.pairs[j].lambda;
        if (lambda.real() >= 0.0) {
            throw NumericalError(
                "reconstruct_power_spectrum: eigenvalue with nonnegative real part "
                "would give a singular Lorentzian term");
        }
        ++used;
        const double a = lambda.real(), b = lambda.imag();
        const std::complex<double> w = series.weights[j];
        for (std::size_t i = 0; i < z_grid.size(); ++i) {
            const double z = z_grid[i];
            const double denom = (z - b) * (z - b) + a * a;
            series.values[i] += (-a * w.real() + (z - b) * w.imag()) / (M_PI * denom);
        }
    }
    series.truncated_pairs = used;
    return series;
}

GridField monomial_observable(const Grid2D& grid, const std::string& name) {
    GridField field(grid);
    for (int iy = 0; iy < grid.ny(); ++iy) {
        for (int ix = 0; ix < grid.nx(); ++ix) {
            const double x = grid.x(ix), y = grid.y(iy);
            double v = 0.0;
            if (name == "x") v = x;
            else if (name == "y") v = y;
            else if (name == "x2") v = x * x;
            else if (name == "x3") v = x * x * x;
            else if (name == "r2") v = x * x + y * y;
            else throw ConfigError("monomial_observable: unknown observable '" + name + "'");
            field.at(ix, iy) = v;
        }
    }
    return field;
}

void write_series_csv(const SpectralSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_series_csv: cannot open " + path);
    if (series.kind == SeriesKind::correlation) {
        out << "t,re_C,im_C\n";
        for (std::size_t i = 0; i < series.abscissa.size(); ++i) {
            out << detail::g17(series.abscissa[i]) << ','
                << detail::g17(series.values[i].real()) << ','
                << detail::g17(series.values[i].imag()) << '\n';
        }
    } else {
        out << "z,S\n";
        for (std::size_t i = 0; i < series.abscissa.size(); ++i) {
            out << detail::g17(series.abscissa[i]) << ','
                << detail::g17(series.values[i].real()) << '\n';
        }
    }
}

} // namespace hopfspec::spectral
