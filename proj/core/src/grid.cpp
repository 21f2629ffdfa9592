#include "hopfspec/grid.hpp"

#include <cmath>
#include <fstream>

#include "hopfspec/detail/format.hpp"
#include "hopfspec/model.hpp"

namespace hopfspec {

Grid2D::Grid2D(int nx, int ny, double half_width)
    : nx_(nx), ny_(ny), half_width_(half_width) {
    if (nx < 2 || ny < 2) {
        throw ConfigError("Grid2D: nx and ny must be >= 2");
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw ConfigError("Grid2D: half_width must be positive and finite");
    }
    dx_ = 2.0 * half_width / nx;
    dy_ = 2.0 * half_width / ny;
    centers_x_.resize(static_cast<std::size_t>(nx));
    centers_y_.resize(static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) centers_x_[i] = -half_width + (i + 0.5) * dx_;
    for (int j = 0; j < ny; ++j) centers_y_[j] = -half_width + (j + 0.5) * dy_;
}

Grid2D build_grid(const ModelParams& params, int nx, int ny, double width_multiplier) {
    params.validate();
    if (width_multiplier <= 0.0) {
        throw ConfigError("build_grid: width_multiplier must be positive");
    }
    if (params.epsilon == 0.0) {
        throw ConfigError(
            "build_grid: epsilon = 0 gives no normalizable stationary density; "
            "use build_grid_with_half_width with an explicit extent");
    }
    const double sigma_hat = model::estimate_sigma_hat(params);
    return Grid2D(nx, ny, width_multiplier * sigma_hat);
}

Grid2D build_grid_with_half_width(int nx, int ny, double half_width) {
    return Grid2D(nx, ny, half_width);
}

GridField constant_field(const Grid2D& grid, std::complex<double> value) {
    return GridField(grid, value);
}

std::complex<double> weighted_inner(const GridField& f, const GridField& g,
                                    const GridField& weight) {
    if (!f.grid.same_layout(g.grid) || !f.grid.same_layout(weight.grid)) {
        throw DimensionError("weighted_inner: fields must share one grid");
    }
    std::complex<double> acc{0.0, 0.0};
    const std::size_t n = f.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        acc += f.values[i] * std::conj(g.values[i]) * weight.values[i].real();
    }
    return acc * f.grid.cell_area();
}

double l1_distance(const GridField& f, const GridField& g) {
    if (!f.grid.same_layout(g.grid)) {
        throw DimensionError("l1_distance: fields must share one grid");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        acc += std::abs(f.values[i].real() - g.values[i].real());
    }
    return acc * f.grid.cell_area();
}

void write_field_csv(const GridField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_field_csv: cannot open " + path);
    out << "ix,iy,x,y,re,im\n";
    const Grid2D& g = field.grid;
    for (int iy = 0; iy < g.ny(); ++iy) {
        for (int ix = 0; ix < g.nx(); ++ix) {
            const auto v = field.at(ix, iy);
            out << ix << ',' << iy << ',' << detail::g17(g.x(ix)) << ','
                << detail::g17(g.y(iy)) << ',' << detail::g17(v.real()) << ','
                << detail::g17(v.imag()) << '\n';
        }
    }
}

} // namespace hopfspec
