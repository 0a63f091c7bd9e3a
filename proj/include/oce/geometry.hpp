#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "oce/matrix.hpp"

namespace oce::geometry {

// Neurons are the columns of a weight matrix throughout this module.

/// Pair distances below this are clamped before inversion in the energy sum.
inline constexpr double kEnergyDistanceFloor = 1e-12;

struct NeuronGeometry {
  std::vector<double> magnitudes;   // ||w_i||
  Matrix directions;                // unit columns w_i / ||w_i||
  Matrix cosines;                   // k x k, unit diagonal
  double energy = 0.0;              // sum_{i<j} 1 / ||u_i - u_j||
  std::size_t clamped_pairs = 0;    // pairs hitting kEnergyDistanceFloor
};

struct GeometryDrift {
  double max_magnitude_rel_delta = 0.0;
  double max_direction_angle = 0.0;   // radians
  double max_cosine_delta = 0.0;
  double energy_rel_delta = 0.0;
  std::size_t clamped_pairs = 0;      // summed over both inputs
};

/// Magnitudes, directions, pairwise cosines and Riesz s=1 hyperspherical
/// energy. Throws a degenerate error naming the first zero-norm column.
NeuronGeometry analyze(const Matrix& w);

/// Hyperspherical energy of a matrix of unit columns.
double hyperspherical_energy(const Matrix& directions, std::size_t* clamped = nullptr);

/// Case A: alpha * W for alpha in (0, 1].
Matrix transform_case_a(const Matrix& w, double alpha);

/// Case B: every column gets its own seeded random rotation Q_i.
Matrix transform_case_b(const Matrix& w, std::uint64_t seed);

/// Case C: shared layer-wise rotation Q * W. Q must satisfy
/// ||Q^T Q - I||_F <= 1e-8.
Matrix transform_case_c(const Matrix& w, const Matrix& q);

inline constexpr double kOrthogonalityTolerance = 1e-8;

GeometryDrift compare(const Matrix& w, const Matrix& w_star);
GeometryDrift compare(const NeuronGeometry& before, const NeuronGeometry& after);

}  // namespace oce::geometry
