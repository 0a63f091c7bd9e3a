#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace oce {

/// Dense row-major matrix of doubles. Both dimensions are at least one and
/// every entry is finite when built from caller data.
class Matrix {
 public:
  /// Zero-filled rows x cols matrix.
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major `data`; validates length and finiteness.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_columns(const std::vector<std::vector<double>>& columns);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  std::string shape_string() const;

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  Matrix transpose() const;
  double trace() const;
  double frobenius_norm() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  /// Bitwise element equality (NaN never appears, so this is value equality).
  friend bool operator==(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
/// Matrix product; throws a dimension error on inner-size mismatch.
Matrix operator*(const Matrix& a, const Matrix& b);

/// a * b^T without materialising the transpose.
Matrix multiply_transposed(const Matrix& a, const Matrix& b);
/// a^T * b without materialising the transpose.
Matrix transposed_multiply(const Matrix& a, const Matrix& b);

/// x * x^T, exactly symmetric.
Matrix gram(const Matrix& x);
/// w * s * w^T for symmetric s, exactly symmetric.
Matrix symmetric_sandwich(const Matrix& w, const Matrix& s);

/// Entry-wise sum of products, trace(a^T b).
double frobenius_inner(const Matrix& a, const Matrix& b);
/// ||a^T a - I||_F for square a.
double orthogonality_residual(const Matrix& a);
bool is_exactly_symmetric(const Matrix& a);
bool all_finite(std::span<const double> values);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

}  // namespace oce
