#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "oce/matrix.hpp"
#include "oce/random.hpp"

namespace oce::linalg {

struct SvdResult {
  Matrix u;                    // d x d, orthogonal
  std::vector<double> sigma;   // non-increasing, >= 0
  Matrix v;                    // d x d, orthogonal
};

/// Full SVD of a square matrix, M = U diag(sigma) V^T.
///
/// Output is deterministic: in every column of U the first entry of largest
/// magnitude is non-negative, with the matching column of V flipped alongside
/// so the product is unchanged.
SvdResult svd(const Matrix& m);

/// Numerical rank from singular values (relative cut at d * eps * sigma_max).
std::size_t numerical_rank(const std::vector<double>& sigma, std::size_t dim);

struct OrthonormalBasis {
  Matrix basis;              // d x r with orthonormal columns
  std::size_t dropped = 0;   // input columns discarded as dependent

  std::size_t rank() const { return basis.cols(); }
};

inline constexpr double kDefaultDropTol = 1e-8;

/// Modified Gram-Schmidt with one re-orthogonalisation pass, columns taken in
/// input order. A column whose residual falls below
/// drop_tol * (largest input column norm) is dropped.
OrthonormalBasis orth(const Matrix& columns, double drop_tol = kDefaultDropTol);

/// Orthogonal projector G G^T onto span(G).
Matrix projector(const OrthonormalBasis& basis);

struct ProcrustesSolution {
  Matrix p;
  std::vector<double> sigma;
  double achieved_trace = 0.0;   // trace(P^T M)
  double nuclear_norm = 0.0;     // sum of sigma
  double orth_residual = 0.0;    // ||P^T P - I||_F
  std::size_t rank = 0;          // numerical rank of M
};

/// argmax over orthogonal P of trace(P^T M).
///
/// P = U V^T from svd(M). When M is exactly symmetric and positive
/// semidefinite the identity attains the nuclear norm and is returned as is,
/// which also fixes the completion for M = 0 and rank-deficient PSD inputs.
ProcrustesSolution procrustes_solve(const Matrix& m);

/// Orthonormalised seeded standard-normal matrix.
Matrix random_orthogonal(std::size_t d, std::uint64_t seed);
Matrix random_orthogonal(std::size_t d, Rng& rng);

/// d x k matrix of independent standard normals.
Matrix random_normal(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace oce::linalg
