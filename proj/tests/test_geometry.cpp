#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oce/errors.hpp"
#include "oce/geometry.hpp"
#include "oce/linalg.hpp"
#include "support.hpp"

using oce::Matrix;
using namespace oce::geometry;

namespace {

// Independent double loop over raw columns.
double reference_energy(const Matrix& w) {
  const Matrix u = testing::unit_columns(w);
  double e = 0.0;
  for (std::size_t i = 0; i < u.cols(); ++i)
    for (std::size_t j = i + 1; j < u.cols(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < u.rows(); ++r) s += (u(r, i) - u(r, j)) * (u(r, i) - u(r, j));
      e += 1.0 / std::max(std::sqrt(s), kEnergyDistanceFloor);
    }
  return e;
}

void check_zero_drift(const GeometryDrift& d) {
  CHECK(d.max_magnitude_rel_delta == 0.0);
  CHECK(d.max_direction_angle == 0.0);
  CHECK(d.max_cosine_delta == 0.0);
  CHECK(d.energy_rel_delta == 0.0);
}

}  // namespace

TEST_CASE("analyze the 2x2 identity") {
  const NeuronGeometry g = analyze(Matrix::identity(2));
  CHECK(g.magnitudes == std::vector<double>{1.0, 1.0});
  CHECK(g.cosines(0, 1) == 0.0);
  CHECK(g.cosines(1, 0) == 0.0);
  CHECK(g.cosines(0, 0) == 1.0);
  CHECK(g.energy == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(g.clamped_pairs == 0);
}

TEST_CASE("analyze is scale invariant in direction") {
  const NeuronGeometry a = analyze(Matrix::identity(2));
  const NeuronGeometry b = analyze(Matrix::from_rows({{2, 0}, {0, 2}}));
  CHECK(b.magnitudes == std::vector<double>{2.0, 2.0});
  CHECK(b.directions == a.directions);
  CHECK(b.cosines == a.cosines);
  CHECK(b.energy == a.energy);
}

TEST_CASE("energy matches a direct recomputation") {
  const Matrix w = testing::gaussian(8, 8, 1);
  CHECK(analyze(w).energy == doctest::Approx(reference_energy(w)).epsilon(1e-14));
}

TEST_CASE("energy is invariant under column permutation") {
  const Matrix w = testing::gaussian(5, 6, 2);
  Matrix perm(5, 6);
  for (std::size_t j = 0; j < 6; ++j) perm.set_column(j, w.column(5 - j));
  CHECK(analyze(perm).energy == doctest::Approx(analyze(w).energy).epsilon(1e-14));
}

TEST_CASE("coincident neurons hit the distance floor") {
  const Matrix w = Matrix::from_columns({{1.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}});
  const NeuronGeometry g = analyze(w);
  CHECK(g.clamped_pairs == 1);
  CHECK(g.energy >= 1.0 / kEnergyDistanceFloor);
}

TEST_CASE("analyze rejects a zero column") {
  try {
    analyze(Matrix::from_columns({{1.0, 0.0}, {0.0, 0.0}}));
    FAIL("expected an error");
  } catch (const oce::Error& e) {
    CHECK(e.kind() == oce::ErrorKind::degenerate);
    CHECK(std::string(e.what()).find("column 1") != std::string::npos);
  }
}

TEST_CASE("case A scaling") {
  const Matrix w = testing::gaussian(6, 5, 3);
  CHECK(transform_case_a(w, 1.0) == w);
  CHECK(transform_case_a(Matrix::identity(2), 0.5) == Matrix::from_rows({{0.5, 0}, {0, 0.5}}));
  CHECK(analyze(transform_case_a(Matrix::identity(2), 0.5)).cosines == analyze(Matrix::identity(2)).cosines);

  const GeometryDrift d = compare(w, transform_case_a(w, 0.25));
  CHECK(d.max_direction_angle == 0.0);
  CHECK(d.max_cosine_delta == 0.0);
  CHECK(d.max_magnitude_rel_delta == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(d.energy_rel_delta == 0.0);

  const GeometryDrift half = compare(w, transform_case_a(w, 0.5));
  CHECK(half.max_direction_angle == 0.0);
  CHECK(half.max_cosine_delta == 0.0);

  CHECK_THROWS_AS(transform_case_a(w, 0.0), oce::Error);
  CHECK_THROWS_AS(transform_case_a(w, 1.5), oce::Error);
}

TEST_CASE("case B neuron-wise rotation") {
  const Matrix single = Matrix::from_columns({{3.0, 4.0, 0.0}});
  const Matrix rotated = transform_case_b(single, 5);
  CHECK(analyze(rotated).magnitudes[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(testing::diff_fro(testing::unit_columns(rotated), testing::unit_columns(single)) > 1e-3);

  const Matrix w = transform_case_b(Matrix::identity(8), 9);
  const NeuronGeometry g = analyze(w);
  double max_off = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(std::abs(g.magnitudes[j] - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < j; ++i) max_off = std::max(max_off, std::abs(g.cosines(i, j)));
  }
  CHECK(max_off > 1e-3);
  CHECK(transform_case_b(Matrix::identity(8), 9) == w);

  try {
    transform_case_b(Matrix::from_rows({{1.0, 2.0}}), 1);
    FAIL("expected an error");
  } catch (const oce::Error& e) {
    CHECK(e.kind() == oce::ErrorKind::dimension);
  }
}

TEST_CASE("case C layer-wise rotation") {
  const Matrix w = testing::gaussian(10, 7, 4);
  CHECK(transform_case_c(w, Matrix::identity(10)) == w);

  const Matrix q = oce::linalg::random_orthogonal(10, 21);
  const GeometryDrift d = compare(w, transform_case_c(w, q));
  CHECK(d.max_magnitude_rel_delta <= 1e-10);
  CHECK(d.max_cosine_delta <= 1e-10);
  CHECK(d.energy_rel_delta <= 1e-9);

  const Matrix rot = Matrix::from_rows({{0, -1}, {1, 0}});
  const Matrix qw = transform_case_c(Matrix::identity(2), rot);
  CHECK(qw == rot);
  CHECK(analyze(qw).cosines(0, 1) == 0.0);

  CHECK_THROWS_AS(transform_case_c(w, Matrix::identity(10) * 1.1), oce::Error);
  CHECK_THROWS_AS(transform_case_c(w, Matrix::identity(9)), oce::Error);
}

TEST_CASE("compare examples") {
  const Matrix w = testing::gaussian(6, 6, 8);
  check_zero_drift(compare(w, w));

  const GeometryDrift half = compare(w, w * 0.5);
  CHECK(half.max_magnitude_rel_delta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.max_direction_angle == 0.0);
  CHECK(half.max_cosine_delta == 0.0);
  CHECK(half.energy_rel_delta == 0.0);

  // Fixed-seed perturbation; values recorded from this implementation.
  const Matrix delta = testing::gaussian(6, 6, 9) * 1e-3;
  const GeometryDrift d = compare(w, w + delta);
  CHECK(d.max_magnitude_rel_delta > 0.0);
  CHECK(d.max_direction_angle > 0.0);
  CHECK(d.max_cosine_delta > 0.0);
  CHECK(d.energy_rel_delta > 0.0);

  CHECK_THROWS_AS(compare(w, testing::gaussian(6, 5, 1)), oce::Error);
}
