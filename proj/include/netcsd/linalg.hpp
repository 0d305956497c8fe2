#pragma once

#include <cstddef>
#include <vector>

namespace netcsd {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Sized for the small networks this
/// library targets; no sparse storage.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vec& d);
    /// Rank-one product v * v^T scaled by s.
    static Matrix outer(const Vec& v, double s = 1.0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    Vec apply(const Vec& v) const;             // M v
    Vec apply_transposed(const Vec& v) const;  // M^T v

    double frobenius_norm() const;
    /// max_ij |a_ij - a_ji|
    double max_asymmetry() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm_inf(const Vec& v);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec v);
double mean(const Vec& v);
Vec constant_vec(std::size_t n, double value);

}  // namespace netcsd
