#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "oce/matrix.hpp"

namespace oce::oracle {

// Independent checks of the closed-form Procrustes solution. Nothing here
// reuses the solver's objective evaluation: every trace is recomputed locally.

struct OracleVerdict {
  double best_objective = 0.0;
  double closed_form_objective = 0.0;
  double gap = 0.0;              // best - closed_form
  std::size_t evaluations = 0;

  /// gap <= tolerance * max(1, |best|)
  bool passes(double relative_tolerance) const;
};

/// trace(P^T M), evaluated entry by entry.
double trace_objective(const Matrix& p, const Matrix& m);

/// Exhaustive scan of O(2): rotations and reflections at angles k * resolution
/// over [0, 2 pi). Resolution must lie in (0, 0.01].
OracleVerdict grid_oracle_2d(const Matrix& m, double resolution, const Matrix& closed_form_p);
/// Same, with the closed form taken from linalg::procrustes_solve.
OracleVerdict grid_oracle_2d(const Matrix& m, double resolution);

struct CayleyOptions {
  std::size_t steps = 5000;
  double step_size = 0.5;        // scaled by 1 / ||M||_F
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
};

inline constexpr std::size_t kCayleyMaxDim = 16;

/// Multi-start ascent of trace(P^T M) over P = (I - S)(I + S)^-1 D, skew S
/// and diagonal sign D. Each accepted step is folded into the base point, so
/// the chart stays centred at the current iterate.
OracleVerdict cayley_ascent(const Matrix& m, const CayleyOptions& options, const Matrix& closed_form_p);
OracleVerdict cayley_ascent(const Matrix& m, const CayleyOptions& options);
OracleVerdict cayley_ascent(const Matrix& m, std::size_t steps, double step_size, std::uint64_t seed);

/// Cayley map (I - S)(I + S)^-1 for skew-symmetric S.
Matrix cayley(const Matrix& skew);

using Objective = std::function<double(const Matrix&)>;

/// Central differences with per-entry step h = step * max(1, |x_ij|).
Matrix finite_diff_grad(const Objective& objective, const Matrix& at, double step = 1e-6);

}  // namespace oce::oracle
