#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "hopfspec/errors.hpp"

namespace hopfspec {

/// Real sparse matrix in compressed-row form.
///
/// At most one stored value per (row, col); generator matrices are square.
class SparseOperator {
public:
    struct Triplet {
        int row;
        int col;
        double value;
    };

    SparseOperator() = default;

    /// Build from triplets; duplicate (row, col) entries are summed.
    static SparseOperator from_triplets(int n_rows, int n_cols,
                                        std::vector<Triplet> triplets);

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }
    std::size_t n_entries() const { return values_.size(); }

    const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
    const std::vector<int>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    /// y = A x for raw real vectors of length n_cols / n_rows.
    void apply(const double* x, double* y) const;
    std::vector<double> apply(const std::vector<double>& x) const;

    /// Complex matvec applied component-wise (the operator is real).
    std::vector<std::complex<double>> apply(const std::vector<std::complex<double>>& x) const;

    SparseOperator transpose() const;

    /// Column sums (zero for conservative generators, up to rounding).
    std::vector<double> column_sums() const;

    double max_abs_value() const;

    /// Coordinate-format text export, one "row col value" line per entry.
    void write_coordinate_text(const std::string& path) const;

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<std::size_t> row_offsets_;
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

} // namespace hopfspec
