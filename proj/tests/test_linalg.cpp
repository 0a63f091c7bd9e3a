#include <doctest.h>

#include <cmath>

#include "oce/errors.hpp"
#include "oce/linalg.hpp"
#include "oce/oracle.hpp"
#include "support.hpp"

using oce::Matrix;
using namespace oce::linalg;
using testing::diff_fro;
using testing::naive_mul;
using testing::naive_t;

namespace {

Matrix reconstruct(const SvdResult& r) {
  Matrix s(r.sigma.size(), r.sigma.size());
  for (std::size_t i = 0; i < r.sigma.size(); ++i) s(i, i) = r.sigma[i];
  return naive_mul(naive_mul(r.u, s), naive_t(r.v));
}

double orth_res(const Matrix& q) {
  return diff_fro(naive_mul(naive_t(q), q), Matrix::identity(q.cols()));
}

}  // namespace

TEST_CASE("svd of a non-negative diagonal is the identity factorisation") {
  const SvdResult r = svd(Matrix::from_rows({{3, 0}, {0, 1}}));
  CHECK(r.u == Matrix::identity(2));
  CHECK(r.v == Matrix::identity(2));
  CHECK(r.sigma == std::vector<double>{3.0, 1.0});
}

TEST_CASE("svd of a rotation has unit singular values") {
  const Matrix m = Matrix::from_rows({{0, -1}, {1, 0}});
  const SvdResult r = svd(m);
  CHECK(r.sigma[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.sigma[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(diff_fro(reconstruct(r), m) <= 1e-14);
  CHECK(orth_res(naive_mul(r.u, naive_t(r.v))) <= 1e-14);
}

TEST_CASE("svd reconstructs random matrices") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = testing::gaussian(8, 8, seed);
    const SvdResult r = svd(m);
    CHECK(diff_fro(reconstruct(r), m) <= 1e-9 * testing::fro(m));
    CHECK(orth_res(r.u) <= 1e-12);
    CHECK(orth_res(r.v) <= 1e-12);
    for (std::size_t i = 1; i < r.sigma.size(); ++i) CHECK(r.sigma[i - 1] >= r.sigma[i]);
    CHECK(r.sigma.back() >= 0.0);
  }
}

TEST_CASE("svd sign convention: largest entry of each U column is non-negative") {
  const Matrix m = testing::gaussian(6, 6, 42);
  const SvdResult r = svd(m);
  for (std::size_t c = 0; c < 6; ++c) {
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < 6; ++i)
      if (std::abs(r.u(i, c)) > std::abs(r.u(pivot, c))) pivot = i;
    CHECK(r.u(pivot, c) >= 0.0);
  }
  // Deterministic: a second call is bitwise identical.
  const SvdResult again = svd(m);
  CHECK(again.u == r.u);
  CHECK(again.v == r.v);
}

TEST_CASE("svd rejects non-square and non-finite input") {
  CHECK_THROWS_AS(svd(Matrix(2, 3)), oce::Error);
  Matrix bad(2, 2);
  bad(0, 0) = std::nan("");
  try {
    svd(bad);
    FAIL("expected an error");
  } catch (const oce::Error& e) {
    CHECK(e.kind() == oce::ErrorKind::validation);
  }
}

TEST_CASE("numerical rank uses the dim * eps * sigma_max cut") {
  CHECK(numerical_rank({3.0, 1.0}, 2) == 2);
  CHECK(numerical_rank({3.0, 1e-17}, 2) == 1);
  CHECK(numerical_rank({0.0, 0.0}, 2) == 0);
}

TEST_CASE("orth of the identity") {
  const OrthonormalBasis b = orth(Matrix::identity(3));
  CHECK(b.basis == Matrix::identity(3));
  CHECK(b.dropped == 0);
  CHECK(b.rank() == 3);
}

TEST_CASE("orth drops a collinear column") {
  const double s = 1.0 / std::sqrt(3.0);
  const Matrix c = Matrix::from_columns({{s, s, s}, {2 * s, 2 * s, 2 * s}});
  const OrthonormalBasis b = orth(c);
  CHECK(b.rank() == 1);
  CHECK(b.dropped == 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(b.basis(i, 0) == doctest::Approx(s).epsilon(1e-15));
}

TEST_CASE("orth spans its input") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix c = testing::gaussian(6, 3, seed);
    const OrthonormalBasis b = orth(c);
    REQUIRE(b.rank() == 3);
    CHECK(orth_res(b.basis) <= 1e-14);
    const Matrix g = b.basis;
    const Matrix residual = c - naive_mul(naive_mul(g, naive_t(g)), c);
    CHECK(testing::fro(residual) <= 1e-8 * testing::fro(c));
  }
}

TEST_CASE("orth errors") {
  CHECK_THROWS_AS(orth(Matrix(3, 2)), oce::Error);
  try {
    orth(Matrix(3, 2));
  } catch (const oce::Error& e) {
    CHECK(e.kind() == oce::ErrorKind::rank);
  }
  CHECK_THROWS_AS(orth(Matrix::identity(2), 0.0), oce::Error);
}

TEST_CASE("projector examples") {
  const OrthonormalBasis e1 = orth(Matrix::from_columns({{1.0, 0.0}}));
  CHECK(projector(e1) == Matrix::from_rows({{1, 0}, {0, 0}}));
  CHECK(projector(orth(Matrix::identity(4))) == Matrix::identity(4));

  const Matrix r = projector(orth(testing::gaussian(7, 3, 5)));
  CHECK(diff_fro(naive_mul(r, r), r) <= 1e-9);
  CHECK(r == r.transpose());
  CHECK(r.trace() == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("procrustes on the identity and on a rotation") {
  const ProcrustesSolution id = procrustes_solve(Matrix::identity(3));
  CHECK(id.p == Matrix::identity(3));
  CHECK(id.achieved_trace == 3.0);

  const Matrix rot = Matrix::from_rows({{0, -1}, {1, 0}});
  const ProcrustesSolution s = procrustes_solve(rot);
  CHECK(diff_fro(s.p, rot) <= 1e-15);
  CHECK(s.achieved_trace == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.nuclear_norm == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("procrustes matches the 2x2 grid oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m = testing::gaussian(2, 2, seed + 300);
    const ProcrustesSolution s = procrustes_solve(m);
    const oce::oracle::OracleVerdict v = oce::oracle::grid_oracle_2d(m, 1e-4, s.p);
    CHECK(std::abs(v.gap) <= 1e-6 * std::max(1.0, std::abs(v.best_objective)));
  }
}

TEST_CASE("procrustes beats sampled orthogonal matrices and hits the nuclear norm") {
  for (std::size_t d : {2u, 4u, 8u}) {
    const Matrix m = testing::gaussian(d, d, 77 + d);
    const ProcrustesSolution s = procrustes_solve(m);
    const double scale = std::max(1.0, s.nuclear_norm);
    CHECK(std::abs(testing::naive_trace_ptm(s.p, m) - s.nuclear_norm) <= 1e-9 * scale);
    // Independent nuclear norm through Jacobi eigenvalues of M^T M.
    CHECK(std::abs(testing::reference_nuclear_norm(m) - s.nuclear_norm) <= 1e-6 * scale);
    CHECK(orth_res(s.p) <= 1e-12);
    for (std::uint64_t q = 0; q < 1000; ++q) {
      const Matrix qm = testing::reference_orthogonal(d, q);
      CHECK(testing::naive_trace_ptm(s.p, m) >= testing::naive_trace_ptm(qm, m) - 1e-9 * scale);
    }
  }
}

TEST_CASE("procrustes transpose property: P(M^T) = P(M)^T") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = testing::gaussian(5, 5, seed + 900);
    const ProcrustesSolution a = procrustes_solve(m);
    const ProcrustesSolution b = procrustes_solve(m.transpose());
    CHECK(diff_fro(b.p, a.p.transpose()) <= 1e-10);
    CHECK(a.nuclear_norm == doctest::Approx(b.nuclear_norm).epsilon(1e-12));
  }
}

TEST_CASE("procrustes returns the identity for symmetric PSD and zero M") {
  const Matrix a = testing::gaussian(6, 4, 3);
  const Matrix spd = naive_mul(a, naive_t(a));  // rank 4 PSD in d = 6
  Matrix sym = spd;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < i; ++j) sym(i, j) = sym(j, i);
  CHECK(procrustes_solve(sym).p == Matrix::identity(6));
  CHECK(procrustes_solve(Matrix(4, 4)).p == Matrix::identity(4));
  CHECK(procrustes_solve(Matrix(4, 4)).rank == 0);
}

TEST_CASE("random_orthogonal") {
  const Matrix one = random_orthogonal(1, 7);
  CHECK(std::abs(one(0, 0)) == 1.0);
  CHECK(random_orthogonal(4, 11) == random_orthogonal(4, 11));
  CHECK(!(random_orthogonal(4, 11) == random_orthogonal(4, 12)));
  CHECK(orth_res(random_orthogonal(16, 3)) <= 4e-10);
  CHECK_THROWS_AS(random_orthogonal(0, 1), oce::Error);
}
