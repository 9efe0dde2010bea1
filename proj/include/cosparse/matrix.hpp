#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cosparse {

/// Dense real matrix stored row-major.
///
/// A default-constructed matrix is the empty 0x0 matrix. Every other
/// constructor requires rows >= 1 and cols >= 1. Constructors that take
/// caller-supplied values reject NaN and infinities.
class DenseMatrix {
  public:
    DenseMatrix() = default;

    /// Zero-filled rows x cols matrix.
    DenseMatrix(std::size_t rows, std::size_t cols);

    /// Takes ownership of row-major data; data.size() must equal rows * cols.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Nested-list literal, one inner list per row.
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix column(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Copy of column c as a contiguous vector.
    std::vector<double> column_values(std::size_t c) const;
    /// N x 1 matrix holding column c.
    DenseMatrix col(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> values);

    DenseMatrix transpose() const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Largest absolute entry-wise difference. Shapes must match.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace cosparse
