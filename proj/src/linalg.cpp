#include "oce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "eigen_bridge.hpp"
#include "oce/errors.hpp"

namespace oce::linalg {

namespace {

// Above this size divide-and-conquer is much faster than two-sided Jacobi.
constexpr std::size_t kJacobiLimit = 128;

void require_square_finite(const Matrix& m, const char* op) {
  if (!m.is_square()) {
    fail(ErrorKind::dimension, std::string(op) + " needs a square matrix, got " + m.shape_string());
  }
  if (!all_finite(m.data())) {
    fail(ErrorKind::validation, std::string(op) + ": non-finite entries");
  }
}

template <typename Solver>
SvdResult unpack(const Solver& solver) {
  SvdResult out{detail::from_eigen(solver.matrixU()), {}, detail::from_eigen(solver.matrixV())};
  const auto& s = solver.singularValues();
  out.sigma.assign(s.data(), s.data() + s.size());
  return out;
}

void apply_sign_convention(SvdResult& r) {
  const std::size_t d = r.u.rows();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t pivot = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double a = std::abs(r.u(i, c));
      if (a > best) {
        best = a;
        pivot = i;
      }
    }
    if (r.u(pivot, c) < 0.0) {
      for (std::size_t i = 0; i < d; ++i) {
        r.u(i, c) = -r.u(i, c);
        r.v(i, c) = -r.v(i, c);
      }
    }
  }
}

bool is_psd(const Matrix& symmetric) {
  const Eigen::SelfAdjointEigenSolver<detail::RowMajor> eig(detail::view(symmetric),
                                                             Eigen::EigenvaluesOnly);
  const double floor = -1e-12 * symmetric.frobenius_norm();
  return eig.eigenvalues().minCoeff() >= floor;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  require_square_finite(m, "svd");
  const Eigen::MatrixXd a = detail::view(m);
  SvdResult r = m.rows() <= kJacobiLimit
                    ? unpack(Eigen::JacobiSVD<Eigen::MatrixXd>(
                          a, Eigen::ComputeFullU | Eigen::ComputeFullV))
                    : unpack(Eigen::BDCSVD<Eigen::MatrixXd>(
                          a, Eigen::ComputeFullU | Eigen::ComputeFullV));
  apply_sign_convention(r);
  return r;
}

std::size_t numerical_rank(const std::vector<double>& sigma, std::size_t dim) {
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const double cut =
      static_cast<double>(dim) * std::numeric_limits<double>::epsilon() * sigma.front();
  return static_cast<std::size_t>(
      std::count_if(sigma.begin(), sigma.end(), [cut](double s) { return s > cut; }));
}

OrthonormalBasis orth(const Matrix& columns, double drop_tol) {
  if (!(drop_tol > 0.0)) fail(ErrorKind::validation, "orth: drop_tol must be positive");
  const std::size_t d = columns.rows();
  const std::size_t k = columns.cols();

  double max_norm = 0.0;
  for (std::size_t j = 0; j < k; ++j) max_norm = std::max(max_norm, norm(columns.column(j)));
  if (max_norm == 0.0) fail(ErrorKind::rank, "orth: all input columns are zero");
  const double cut = drop_tol * max_norm;

  std::vector<std::vector<double>> kept;
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> v = columns.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) {
        const double h = dot(q, v);
        for (std::size_t i = 0; i < d; ++i) v[i] -= h * q[i];
      }
    }
    const double n = norm(v);
    if (n < cut) {
      ++dropped;
      continue;
    }
    for (double& x : v) x /= n;
    kept.push_back(std::move(v));
  }
  if (kept.empty()) {
    fail(ErrorKind::rank, "orth: every column fell below the drop tolerance");
  }
  return {Matrix::from_columns(kept), dropped};
}

Matrix projector(const OrthonormalBasis& basis) { return gram(basis.basis); }

ProcrustesSolution procrustes_solve(const Matrix& m) {
  require_square_finite(m, "procrustes_solve");
  const std::size_t d = m.rows();
  SvdResult f = svd(m);

  ProcrustesSolution out{Matrix::identity(d), f.sigma};
  if (!(is_exactly_symmetric(m) && is_psd(m))) {
    out.p = multiply_transposed(f.u, f.v);
  }
  out.achieved_trace = frobenius_inner(out.p, m);
  for (double s : f.sigma) out.nuclear_norm += s;
  out.orth_residual = orthogonality_residual(out.p);
  out.rank = numerical_rank(f.sigma, d);
  return out;
}

Matrix random_normal(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (double& x : g.data()) x = rng.normal();
  return g;
}

Matrix random_orthogonal(std::size_t d, Rng& rng) {
  if (d == 0) fail(ErrorKind::validation, "random_orthogonal: d must be positive");
  for (;;) {
    OrthonormalBasis q = orth(random_normal(d, d, rng), 1e-6);
    // A Gaussian draw is rank-deficient with probability zero; redraw if it happens.
    if (q.dropped == 0) return std::move(q.basis);
  }
}

Matrix random_orthogonal(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthogonal(d, rng);
}

}  // namespace oce::linalg
