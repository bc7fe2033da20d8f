#include "numerics/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace gs {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols_)
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

Matrix Matrix::row_vector(std::initializer_list<double> values) {
    Matrix m(1, values.size());
    std::size_t c = 0;
    for (double v : values) m(0, c++) = v;
    return m;
}

Matrix Matrix::row_vector(const std::vector<double>& values) {
    Matrix m(1, values.size());
    for (std::size_t c = 0; c < values.size(); ++c) m(0, c) = values[c];
    return m;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "Matrix::operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double scalar) {
    for (double& v : data_) v *= scalar;
    return *this;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch " +
                                    a.shape_str() + " vs " + b.shape_str());
}

void require_shape(const Matrix& a, std::size_t rows, std::size_t cols, const char* where) {
    if (a.rows() != rows || a.cols() != cols)
        throw std::invalid_argument(std::string(where) + ": expected shape " +
                                    std::to_string(rows) + "x" + std::to_string(cols) +
                                    ", got " + a.shape_str());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                    a.shape_str() + " vs " + b.shape_str());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        double* dst = out.row(i);
        const double* arow = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b.row(p);
            for (std::size_t j = 0; j < n; ++j) dst[j] += av * brow[j];
        }
    }
    return out;
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_transpose_a: row counts disagree, " +
                                    a.shape_str() + " vs " + b.shape_str());
    const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
    Matrix out(m, n);
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = a.row(p);
        const double* brow = b.row(p);
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            double* dst = out.row(i);
            for (std::size_t j = 0; j < n; ++j) dst[j] += av * brow[j];
        }
    }
    return out;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_transpose_b: column counts disagree, " +
                                    a.shape_str() + " vs " + b.shape_str());
    // b is transposed once so the inner loop stays contiguous.
    return matmul(a, transpose(b));
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        double* dst = out.row(i);
        const double* src = b.row(i);
        for (std::size_t j = 0; j < out.cols(); ++j) dst[j] *= src[j];
    }
    return out;
}

}  // namespace gs
