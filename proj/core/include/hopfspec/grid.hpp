#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "hopfspec/errors.hpp"
#include "hopfspec/params.hpp"

namespace hopfspec {

/// Uniform Cartesian tensor grid on the square [-half_width, +half_width]^2.
///
/// Cells are indexed row-major, index = iy * nx + ix, with centers at
/// -half_width + (i + 1/2) * dx. All fields and operators in the project
/// share this ordering.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(int nx, int ny, double half_width);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double half_width() const { return half_width_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double cell_area() const { return dx_ * dy_; }
    std::size_t n_cells() const { return static_cast<std::size_t>(nx_) * ny_; }

    double x(int ix) const { return centers_x_[static_cast<std::size_t>(ix)]; }
    double y(int iy) const { return centers_y_[static_cast<std::size_t>(iy)]; }
    const std::vector<double>& centers_x() const { return centers_x_; }
    const std::vector<double>& centers_y() const { return centers_y_; }

    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * nx_ + ix;
    }

    bool same_layout(const Grid2D& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_ && half_width_ == other.half_width_;
    }

private:
    int nx_ = 0;
    int ny_ = 0;
    double half_width_ = 0.0;
    double dx_ = 0.0;
    double dy_ = 0.0;
    std::vector<double> centers_x_;
    std::vector<double> centers_y_;
};

/// Grid with half_width = width_multiplier * sigma_hat(params), the
/// sigma-scaled domain used for all operator discretizations.
/// Requires epsilon > 0 so that the stationary density is normalizable;
/// for epsilon = 0 use build_grid_with_half_width with an explicit extent.
Grid2D build_grid(const ModelParams& params, int nx, int ny, double width_multiplier);

/// Grid with an explicitly prescribed half width.
Grid2D build_grid_with_half_width(int nx, int ny, double half_width);

/// One complex value per cell, row-major, tied to the grid it was sampled on.
struct GridField {
    Grid2D grid;
    std::vector<std::complex<double>> values;

    GridField() = default;
    GridField(const Grid2D& g, std::complex<double> fill = {0.0, 0.0})
        : grid(g), values(g.n_cells(), fill) {}

    std::complex<double>& at(int ix, int iy) { return values[grid.index(ix, iy)]; }
    const std::complex<double>& at(int ix, int iy) const { return values[grid.index(ix, iy)]; }
};

/// Field of all ones on the given grid.
GridField constant_field(const Grid2D& grid, std::complex<double> value = {1.0, 0.0});

/// Measure-weighted inner product: sum_i f_i * conj(g_i) * w_i * dx * dy.
/// The weight must be real and nonnegative; the second argument is conjugated.
std::complex<double> weighted_inner(const GridField& f, const GridField& g,
                                    const GridField& weight);

/// L1 distance between two real fields, sum |f - g| * dxdy.
double l1_distance(const GridField& f, const GridField& g);

/// CSV serialization, header "ix,iy,x,y,re,im", row-major order, 17 significant digits.
void write_field_csv(const GridField& field, const std::string& path);

} // namespace hopfspec
