#include <doctest.h>

#include <cmath>

#include "oce/errors.hpp"
#include "oce/linalg.hpp"
#include "oce/oracle.hpp"
#include "support.hpp"

using oce::Matrix;
using namespace oce::oracle;

TEST_CASE("grid oracle on the identity") {
  const OracleVerdict v = grid_oracle_2d(Matrix::identity(2), 1e-4);
  CHECK(v.best_objective == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(v.closed_form_objective == 2.0);
  CHECK(v.passes(1e-12));
}

TEST_CASE("grid oracle reaches trace 2 for diag(1, -1) via a reflection") {
  const Matrix m = Matrix::from_rows({{1, 0}, {0, -1}});
  const OracleVerdict v = grid_oracle_2d(m, 1e-4);
  CHECK(v.best_objective == doctest::Approx(2.0).epsilon(1e-15));
  // Rotations alone top out at 0 for this M.
  double best_rotation = -10.0;
  for (int k = 0; k < 62832; ++k) {
    const double t = k * 1e-4;
    best_rotation = std::max(best_rotation, std::cos(t) - std::cos(t));
  }
  CHECK(best_rotation == 0.0);
  CHECK(v.closed_form_objective == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("grid oracle agrees with the closed form on random 2x2 matrices") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = testing::gaussian(2, 2, seed + 500);
    const OracleVerdict v = grid_oracle_2d(m, 1e-4);
    CHECK(std::abs(v.gap) <= 1e-6);
    CHECK(v.evaluations > 0);
  }
}

TEST_CASE("grid oracle argument checks") {
  CHECK_THROWS_AS(grid_oracle_2d(Matrix::identity(3), 1e-4), oce::Error);
  CHECK_THROWS_AS(grid_oracle_2d(Matrix::identity(2), 0.0), oce::Error);
  CHECK_THROWS_AS(grid_oracle_2d(Matrix::identity(2), 0.1), oce::Error);
}

TEST_CASE("cayley map is orthogonal for skew input") {
  Matrix s(4, 4);
  s(0, 1) = 0.7;
  s(1, 0) = -0.7;
  s(2, 3) = -1.3;
  s(3, 2) = 1.3;
  s(0, 3) = 0.2;
  s(3, 0) = -0.2;
  const Matrix q = cayley(s);
  CHECK(testing::diff_fro(testing::naive_mul(testing::naive_t(q), q), Matrix::identity(4)) <= 1e-14);
  CHECK(cayley(Matrix(3, 3)) == Matrix::identity(3));
}

TEST_CASE("cayley ascent on the identity converges to 4") {
  const OracleVerdict v = cayley_ascent(Matrix::identity(4), 5000, 0.5, 0);
  CHECK(v.best_objective == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(v.passes(1e-6));
}

TEST_CASE("cayley ascent on an SPD matrix converges to its trace") {
  const Matrix a = testing::gaussian(6, 6, 1);
  const Matrix spd = oce::symmetric_sandwich(a, Matrix::identity(6)) + Matrix::identity(6);
  const OracleVerdict v = cayley_ascent(spd, 5000, 0.5, 3);
  CHECK(v.best_objective == doctest::Approx(spd.trace()).epsilon(1e-10));
}

TEST_CASE("cayley ascent never beats the closed form") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m = testing::gaussian(8, 8, seed + 600);
    const OracleVerdict v = cayley_ascent(m, 5000, 0.5, seed);
    CHECK(v.passes(1e-6));
    // And gets close to it: the ascent is a genuine optimiser, not a no-op.
    CHECK(v.best_objective >= v.closed_form_objective - 1e-6 * std::max(1.0, v.closed_form_objective));
  }
}

TEST_CASE("cayley ascent and the grid agree in 2d") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = testing::gaussian(2, 2, seed + 700);
    const OracleVerdict grid = grid_oracle_2d(m, 1e-4);
    const OracleVerdict ascent = cayley_ascent(m, 5000, 0.5, seed);
    CHECK(std::abs(grid.best_objective - ascent.best_objective) <= 2e-6);
  }
}

TEST_CASE("closed-form objective equals the solver's achieved trace") {
  for (std::size_t d : {3u, 7u, 16u}) {
    const Matrix m = testing::gaussian(d, d, 800 + d);
    const oce::linalg::ProcrustesSolution s = oce::linalg::procrustes_solve(m);
    CHECK(std::abs(trace_objective(s.p, m) - s.achieved_trace) <= 1e-12 * std::max(1.0, s.nuclear_norm));
  }
}

TEST_CASE("cayley ascent argument checks") {
  CHECK_THROWS_AS(cayley_ascent(Matrix::identity(17), 10, 0.5, 0), oce::Error);
  CHECK_THROWS_AS(cayley_ascent(Matrix::identity(3), 0, 0.5, 0), oce::Error);
  CHECK_THROWS_AS(cayley_ascent(Matrix::identity(3), 10, -1.0, 0), oce::Error);
  CHECK(cayley_ascent(Matrix::identity(3), 100, 0.5, 1).best_objective ==
        cayley_ascent(Matrix::identity(3), 100, 0.5, 1).best_objective);
}

TEST_CASE("finite-difference gradient of the squared Frobenius norm") {
  const Objective sqnorm = [](const Matrix& x) {
    double s = 0.0;
    for (double v : x.data()) s += v * v;
    return s;
  };
  const Matrix g0 = finite_diff_grad(sqnorm, Matrix(3, 2));
  CHECK(testing::fro(g0) <= 1e-12);

  const Matrix x0 = testing::gaussian(3, 4, 9);
  const Matrix g = finite_diff_grad(sqnorm, x0);
  CHECK(testing::diff_fro(g, x0 * 2.0) <= 1e-6);
  CHECK_THROWS_AS(finite_diff_grad(sqnorm, x0, 0.0), oce::Error);
}
