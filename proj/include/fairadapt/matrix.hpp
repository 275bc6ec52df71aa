#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace fairadapt {

// Dense row-major f64 matrix. Values are validated to be finite on
// construction from data; the optimizer re-checks after every step.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);  // zero-filled
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols);
  }
  static Matrix full(std::size_t rows, std::size_t cols, double value);
  static Matrix row_vector(std::vector<double> data);
  static Matrix column_vector(std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_str() const;

  bool all_finite() const;
  // Throws NumericError naming `context` if any entry is NaN/Inf.
  void require_finite(const std::string& context) const;

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// c = a * b. Throws ShapeError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);
// c = a^T * b and c = a * b^T, used by the backward pass.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);

}  // namespace fairadapt
