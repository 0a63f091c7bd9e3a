#include "oce/matrix.hpp"

#include <cmath>
#include <string>

#include "eigen_bridge.hpp"
#include "oce/errors.hpp"

namespace oce {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    fail(ErrorKind::dimension, "matrix dimensions must be positive, got " +
                                   std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::dimension, std::string(op) + ": shape mismatch " + a.shape_string() +
                                   " vs " + b.shape_string());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  require_positive(rows, cols);
  data_.assign(rows * cols, 0.0);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_positive(rows, cols);
  if (data_.size() != rows * cols) {
    fail(ErrorKind::dimension, "matrix data length " + std::to_string(data_.size()) +
                                   " does not match " + shape_string());
  }
  if (!all_finite(data_)) {
    fail(ErrorKind::validation, "matrix " + shape_string() + " contains non-finite entries");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorKind::dimension, "ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) fail(ErrorKind::dimension, "no columns given");
  const std::size_t r = columns.front().size();
  require_positive(r, columns.size());
  Matrix m(r, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != r) fail(ErrorKind::dimension, "ragged column list");
    m.set_column(j, columns[j]);
  }
  if (!all_finite(m.data())) fail(ErrorKind::validation, "non-finite column entries");
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) fail(ErrorKind::dimension, "column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double Matrix::trace() const {
  if (!is_square()) fail(ErrorKind::dimension, "trace of non-square " + shape_string());
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const { return norm(data_); }

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorKind::dimension,
         "product: inner size mismatch " + a.shape_string() + " * " + b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  detail::view(out).noalias() = detail::view(a) * detail::view(b);
  return out;
}

Matrix multiply_transposed(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorKind::dimension,
         "product: inner size mismatch " + a.shape_string() + " * (" + b.shape_string() + ")^T");
  }
  Matrix out(a.rows(), b.rows());
  detail::view(out).noalias() = detail::view(a) * detail::view(b).transpose();
  return out;
}

Matrix transposed_multiply(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorKind::dimension,
         "product: inner size mismatch (" + a.shape_string() + ")^T * " + b.shape_string());
  }
  Matrix out(a.cols(), b.cols());
  detail::view(out).noalias() = detail::view(a).transpose() * detail::view(b);
  return out;
}

Matrix gram(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) s += x(i, c) * x(j, c);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

Matrix symmetric_sandwich(const Matrix& w, const Matrix& s) {
  if (!s.is_square() || s.rows() != w.cols()) {
    fail(ErrorKind::dimension,
         "sandwich: " + w.shape_string() + " * " + s.shape_string() + " * transpose");
  }
  const Matrix ws = w * s;
  const std::size_t n = w.rows();
  const std::size_t k = w.cols();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < k; ++c) acc += ws(i, c) * w(j, c);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "inner product");
  return dot(a.data(), b.data());
}

double orthogonality_residual(const Matrix& a) {
  if (!a.is_square()) fail(ErrorKind::dimension, "orthogonality of non-square " + a.shape_string());
  Matrix g = transposed_multiply(a, a);
  g -= Matrix::identity(a.rows());
  return g.frobenius_norm();
}

bool is_exactly_symmetric(const Matrix& a) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (a(i, j) != a(j, i)) return false;
  return true;
}

bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::dimension, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace oce
