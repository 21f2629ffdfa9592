#include "hopfspec/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hopfspec/detail/format.hpp"

namespace hopfspec {

SparseOperator SparseOperator::from_triplets(int n_rows, int n_cols,
                                             std::vector<Triplet> triplets) {
    if (n_rows <= 0 || n_cols <= 0) {
        throw ConfigError("SparseOperator: dimensions must be positive");
    }
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
            throw DimensionError("SparseOperator: triplet index out of range");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseOperator op;
    op.n_rows_ = n_rows;
    op.n_cols_ = n_cols;
    op.row_offsets_.assign(static_cast<std::size_t>(n_rows) + 1, 0);
    op.col_indices_.reserve(triplets.size());
    op.values_.reserve(triplets.size());

    std::size_t i = 0;
    for (int row = 0; row < n_rows; ++row) {
        op.row_offsets_[row] = op.values_.size();
        while (i < triplets.size() && triplets[i].row == row) {
            const int col = triplets[i].col;
            double sum = 0.0;
            while (i < triplets.size() && triplets[i].row == row && triplets[i].col == col) {
                sum += triplets[i].value;
                ++i;
            }
            op.col_indices_.push_back(col);
            op.values_.push_back(sum);
        }
    }
    op.row_offsets_[n_rows] = op.values_.size();
    return op;
}

void SparseOperator::apply(const double* x, double* y) const {
    for (int row = 0; row < n_rows_; ++row) {
        double acc = 0.0;
        for (std::size_t k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k) {
            acc += values_[k] * x[col_indices_[k]];
        }
        y[row] = acc;
    }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_cols_) {
        throw DimensionError("SparseOperator::apply: dimension mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(n_rows_));
    apply(x.data(), y.data());
    return y;
}

std::vector<std::complex<double>> SparseOperator::apply(
    const std::vector<std::complex<double>>& x) const {
    if (static_cast<int>(x.size()) != n_cols_) {
        throw DimensionError("SparseOperator::apply: dimension mismatch");
    }
    std::vector<std::complex<double>> y(static_cast<std::size_t>(n_rows_));
    for (int row = 0; row < n_rows_; ++row) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k) {
            acc += values_[k] * x[col_indices_[k]];
        }
        y[row] = acc;
    }
    return y;
}

SparseOperator SparseOperator::transpose() const {
    std::vector<Triplet> triplets;
    triplets.reserve(values_.size());
    for (int row = 0; row < n_rows_; ++row) {
        for (std::size_t k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k) {
            triplets.push_back({col_indices_[k], row, values_[k]});
        }
    }
    return from_triplets(n_cols_, n_rows_, std::move(triplets));
}

std::vector<double> SparseOperator::column_sums() const {
    std::vector<double> sums(static_cast<std::size_t>(n_cols_), 0.0);
    for (int row = 0; row < n_rows_; ++row) {
        for (std::size_t k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k) {
            sums[col_indices_[k]] += values_[k];
        }
    }
    return sums;
}

double SparseOperator::max_abs_value() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void SparseOperator::write_coordinate_text(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_coordinate_text: cannot open " + path);
    for (int row = 0; row < n_rows_; ++row) {
        for (std::size_t k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k) {
            out << row << ' ' << col_indices_[k] << ' ' << detail::g17(values_[k]) << '\n';
        }
    }
}

} // namespace hopfspec
