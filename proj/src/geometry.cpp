#include "oce/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oce/errors.hpp"
#include "oce/linalg.hpp"
#include "oce/random.hpp"

namespace oce::geometry {

namespace {

double pair_distance(const Matrix& u, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t r = 0; r < u.rows(); ++r) {
    const double diff = u(r, i) - u(r, j);
    s += diff * diff;
  }
  return std::sqrt(s);
}

// Angle between two unit vectors from their chord length; exact zero for
// identical inputs and well conditioned near zero, unlike acos.
double unit_angle(const Matrix& a, const Matrix& b, std::size_t col) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double diff = a(r, col) - b(r, col);
    s += diff * diff;
  }
  return 2.0 * std::asin(std::min(1.0, std::sqrt(s) / 2.0));
}

}  // namespace

double hyperspherical_energy(const Matrix& directions, std::size_t* clamped) {
  const std::size_t k = directions.cols();
  double energy = 0.0;
  std::size_t floor_hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double dist = pair_distance(directions, i, j);
      if (dist < kEnergyDistanceFloor) {
        dist = kEnergyDistanceFloor;
        ++floor_hits;
      }
      energy += 1.0 / dist;
    }
  }
  if (clamped != nullptr) *clamped = floor_hits;
  return energy;
}

NeuronGeometry analyze(const Matrix& w) {
  const std::size_t d = w.rows();
  const std::size_t k = w.cols();
  NeuronGeometry g{std::vector<double>(k), Matrix(d, k), Matrix(k, k)};
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col = w.column(j);
    const double n = norm(col);
    if (n == 0.0) {
      fail(ErrorKind::degenerate, "neuron column " + std::to_string(j) + " has zero norm");
    }
    g.magnitudes[j] = n;
    for (double& x : col) x /= n;
    g.directions.set_column(j, col);
  }
  for (std::size_t i = 0; i < k; ++i) {
    g.cosines(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      double c = 0.0;
      for (std::size_t r = 0; r < d; ++r) c += g.directions(r, i) * g.directions(r, j);
      c = std::clamp(c, -1.0, 1.0);
      g.cosines(i, j) = c;
      g.cosines(j, i) = c;
    }
  }
  g.energy = hyperspherical_energy(g.directions, &g.clamped_pairs);
  return g;
}

Matrix transform_case_a(const Matrix& w, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::validation, "scale factor alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  return w * alpha;
}

Matrix transform_case_b(const Matrix& w, std::uint64_t seed) {
  const std::size_t d = w.rows();
  if (d < 2) {
    fail(ErrorKind::dimension, "neuron-wise rotation needs at least 2 rows, got " + std::to_string(d));
  }
  Rng rng(seed);
  Matrix out(d, w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) {
    const Matrix q = linalg::random_orthogonal(d, rng);
    const std::vector<double> col = w.column(j);
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += q(r, c) * col[c];
      out(r, j) = s;
    }
  }
  return out;
}

Matrix transform_case_c(const Matrix& w, const Matrix& q) {
  if (!q.is_square() || q.rows() != w.rows()) {
    fail(ErrorKind::dimension,
         "layer rotation " + q.shape_string() + " does not match weights " + w.shape_string());
  }
  const double residual = orthogonality_residual(q);
  if (residual > kOrthogonalityTolerance) {
    fail(ErrorKind::validation,
         "layer rotation is not orthogonal: ||Q^T Q - I||_F = " + std::to_string(residual));
  }
  return q * w;
}

GeometryDrift compare(const NeuronGeometry& before, const NeuronGeometry& after) {
  const std::size_t k = before.magnitudes.size();
  if (after.magnitudes.size() != k || before.directions.rows() != after.directions.rows()) {
    fail(ErrorKind::dimension, "geometry compare: shape mismatch " +
                                   before.directions.shape_string() + " vs " +
                                   after.directions.shape_string());
  }
  GeometryDrift drift;
  for (std::size_t j = 0; j < k; ++j) {
    const double rel = std::abs(after.magnitudes[j] - before.magnitudes[j]) / before.magnitudes[j];
    drift.max_magnitude_rel_delta = std::max(drift.max_magnitude_rel_delta, rel);
    drift.max_direction_angle =
        std::max(drift.max_direction_angle, unit_angle(before.directions, after.directions, j));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j)
      drift.max_cosine_delta =
          std::max(drift.max_cosine_delta, std::abs(after.cosines(i, j) - before.cosines(i, j)));

  const double energy_delta = std::abs(after.energy - before.energy);
  drift.energy_rel_delta = before.energy > 0.0 ? energy_delta / before.energy : energy_delta;
  drift.clamped_pairs = before.clamped_pairs + after.clamped_pairs;
  return drift;
}

GeometryDrift compare(const Matrix& w, const Matrix& w_star) {
  if (w.rows() != w_star.rows() || w.cols() != w_star.cols()) {
    fail(ErrorKind::dimension,
         "geometry compare: shape mismatch " + w.shape_string() + " vs " + w_star.shape_string());
  }
  return compare(analyze(w), analyze(w_star));
}

}  // namespace oce::geometry
