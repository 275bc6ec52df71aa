#include "fairadapt/matrix.hpp"

#include <cmath>

#include "fairadapt/errors.hpp"

namespace fairadapt {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                     " does not match " + shape_str());
  }
  require_finite("Matrix construction");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("Matrix: ragged initializer rows");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite("Matrix construction");
}

Matrix Matrix::full(std::size_t rows, std::size_t cols, double value) {
  Matrix m(rows, cols);
  for (auto& x : m.data_) x = value;
  m.require_finite("Matrix::full");
  return m;
}

Matrix Matrix::row_vector(std::vector<double> data) {
  const std::size_t n = data.size();
  return Matrix(1, n, std::move(data));
}

Matrix Matrix::column_vector(std::vector<double> data) {
  const std::size_t n = data.size();
  return Matrix(n, 1, std::move(data));
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

bool Matrix::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void Matrix::require_finite(const std::string& context) const {
  if (!all_finite()) {
    throw NumericError(context + ": non-finite entry in " + shape_str() +
                       " matrix");
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + a.shape_str() + " * " + b.shape_str());
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  // i-k-j order keeps both streams contiguous for row-major storage.
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * k;
    double* crow = c.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aik = arow[p];
      if (aik == 0.0) continue;
      const double* brow = b.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: " + a.shape_str() + "^T * " + b.shape_str());
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * k;
    const double* brow = b.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double apt = arow[p];
      if (apt == 0.0) continue;
      double* crow = c.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) {
        crow[j] += apt * brow[j];
      }
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: " + a.shape_str() + " * " + b.shape_str() +
                     "^T");
  }
  Matrix c(a.rows(), b.rows());
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * k;
    double* crow = c.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = b.data() + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        acc += arow[p] * brow[p];
      }
      crow[j] = acc;
    }
  }
  return c;
}

}  // namespace fairadapt
