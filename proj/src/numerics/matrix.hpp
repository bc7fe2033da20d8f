#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace gs {

// Dense row-major matrix of 64-bit floats. Vectors (biases, batch-norm
// parameters) are carried as 1xN matrices so optimizers and checkpoints can
// treat every learnable tensor uniformly.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix row_vector(std::initializer_list<double> values);
    static Matrix row_vector(const std::vector<double>& values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::string shape_str() const;
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator*=(double scalar);
    void fill(double value) { data_.assign(data_.size(), value); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// out = transpose(a) * b, without materializing the transpose
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
// out = a * transpose(b)
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);

// Throws std::invalid_argument naming both shapes when they disagree.
void require_same_shape(const Matrix& a, const Matrix& b, const char* where);
void require_shape(const Matrix& a, std::size_t rows, std::size_t cols, const char* where);

}  // namespace gs
