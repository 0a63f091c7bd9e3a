#pragma once

// Reference routines for the test suites. Everything here is written
// without the library's linear algebra so it can serve as an oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "oce/matrix.hpp"

namespace testing {

using oce::Matrix;

inline Matrix naive_mul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0.0L;
      for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
      c(i, j) = static_cast<double>(s);
    }
  return c;
}

inline Matrix naive_t(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double fro(const Matrix& a) {
  long double s = 0.0L;
  for (double x : a.data()) s += static_cast<long double>(x) * x;
  return std::sqrt(static_cast<double>(s));
}

inline double diff_fro(const Matrix& a, const Matrix& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const long double d = static_cast<long double>(a(i, j)) - b(i, j);
      s += d * d;
    }
  return std::sqrt(static_cast<double>(s));
}

inline double naive_trace_ptm(const Matrix& p, const Matrix& m) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) s += static_cast<long double>(p(i, j)) * m(i, j);
  return static_cast<double>(s);
}

// Gaussian matrix from std::normal_distribution, deliberately a different
// stream than the library's Rng.
inline Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937 gen(static_cast<std::uint32_t>(seed * 2654435761u + 17u));
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = nd(gen);
  return m;
}

inline Matrix unit_columns(Matrix m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
    s = std::sqrt(s);
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) /= s;
  }
  return m;
}

// Classical Gram-Schmidt with re-orthogonalisation; oracle for orthogonal
// matrices independent of the library's own generator.
inline Matrix reference_orthogonal(std::size_t d, std::uint64_t seed) {
  Matrix a = gaussian(d, d, seed + 1000);
  Matrix q(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = a(i, j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double h = 0.0;
        for (std::size_t i = 0; i < d; ++i) h += q(i, k) * v[i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= h * q(i, k);
      }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (std::size_t i = 0; i < d; ++i) q(i, j) = v[i] / n;
  }
  return q;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30 * std::max(1.0, fro(a) * fro(a))) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Nuclear norm via eigenvalues of M^T M.
inline double reference_nuclear_norm(const Matrix& m) {
  double s = 0.0;
  for (double ev : jacobi_eigenvalues(naive_mul(naive_t(m), m))) s += std::sqrt(std::max(0.0, ev));
  return s;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("oce_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
