#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lugeon {

/// Dense row-major matrix of doubles. Rows are samples, columns attributes.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_)
            throw std::invalid_argument("Matrix: value count does not match shape");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
        return out;
    }

    void append_row(std::span<const double> r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw std::invalid_argument("Matrix: row width mismatch");
        values_.insert(values_.end(), r.begin(), r.end());
        ++rows_;
    }

    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Per-column affine map onto [0,1]. Zero-range columns map to 0.
struct MinMax {
    std::vector<double> lo;
    std::vector<double> hi;

    static MinMax fit(const Matrix& data);

    std::size_t dims() const noexcept { return lo.size(); }
    double span(std::size_t j) const noexcept {
        const double s = hi[j] - lo[j];
        return s > 0.0 ? s : 1.0;
    }
    double forward(std::size_t j, double v) const noexcept { return (v - lo[j]) / span(j); }
    double inverse(std::size_t j, double u) const noexcept { return lo[j] + u * span(j); }

    Matrix forward(const Matrix& data) const;
    std::vector<double> forward(std::span<const double> v) const;

    friend bool operator==(const MinMax&, const MinMax&) = default;
};

}  // namespace lugeon
