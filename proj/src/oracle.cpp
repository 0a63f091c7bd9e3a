#include "oce/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "eigen_bridge.hpp"
#include "oce/errors.hpp"
#include "oce/linalg.hpp"
#include "oce/random.hpp"

namespace oce::oracle {

namespace {

OracleVerdict make_verdict(double best, const Matrix& closed_form_p, const Matrix& m,
                           std::size_t evaluations) {
  OracleVerdict v;
  v.best_objective = best;
  v.closed_form_objective = trace_objective(closed_form_p, m);
  v.gap = v.best_objective - v.closed_form_objective;
  v.evaluations = evaluations;
  return v;
}

void require_closed_form_shape(const Matrix& m, const Matrix& p) {
  if (p.rows() != m.rows() || p.cols() != m.cols()) {
    fail(ErrorKind::dimension, "closed-form P " + p.shape_string() + " does not match M " + m.shape_string());
  }
}

}  // namespace

bool OracleVerdict::passes(double relative_tolerance) const {
  return gap <= relative_tolerance * std::max(1.0, std::abs(best_objective));
}

double trace_objective(const Matrix& p, const Matrix& m) {
  if (p.rows() != m.rows() || p.cols() != m.cols()) {
    fail(ErrorKind::dimension, "trace objective: " + p.shape_string() + " vs " + m.shape_string());
  }
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t += p(i, j) * m(i, j);
  return t;
}

OracleVerdict grid_oracle_2d(const Matrix& m, double resolution, const Matrix& closed_form_p) {
  if (m.rows() != 2 || m.cols() != 2) {
    fail(ErrorKind::dimension, "grid oracle needs a 2x2 matrix, got " + m.shape_string());
  }
  if (!(resolution > 0.0 && resolution <= 0.01)) {
    fail(ErrorKind::validation, "grid resolution must lie in (0, 0.01]");
  }
  require_closed_form_shape(m, closed_form_p);

  const auto count = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / resolution));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = static_cast<double>(k) * resolution;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // rotation [[c, -s], [s, c]] and reflection [[c, s], [s, -c]]
    const double rotation = c * m(0, 0) - s * m(0, 1) + s * m(1, 0) + c * m(1, 1);
    const double reflection = c * m(0, 0) + s * m(0, 1) + s * m(1, 0) - c * m(1, 1);
    best = std::max({best, rotation, reflection});
  }
  return make_verdict(best, closed_form_p, m, 2 * count);
}

OracleVerdict grid_oracle_2d(const Matrix& m, double resolution) {
  if (m.rows() != 2 || m.cols() != 2) {
    fail(ErrorKind::dimension, "grid oracle needs a 2x2 matrix, got " + m.shape_string());
  }
  return grid_oracle_2d(m, resolution, linalg::procrustes_solve(m).p);
}

Matrix cayley(const Matrix& skew) {
  if (!skew.is_square()) fail(ErrorKind::dimension, "cayley map needs a square matrix");
  const auto n = static_cast<Eigen::Index>(skew.rows());
  const Eigen::MatrixXd s = detail::view(skew);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  // X (I + S) = I - S  <=>  (I - S) X^T = I + S for skew S.
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(id - s);
  const Eigen::MatrixXd xt = lu.solve(id + s);
  return detail::from_eigen(xt.transpose());
}

OracleVerdict cayley_ascent(const Matrix& m, const CayleyOptions& options, const Matrix& closed_form_p) {
  if (!m.is_square()) fail(ErrorKind::dimension, "cayley ascent needs a square matrix");
  const std::size_t d = m.rows();
  if (d > kCayleyMaxDim) {
    fail(ErrorKind::dimension, "cayley ascent is limited to d <= 16, got " + std::to_string(d));
  }
  if (options.steps == 0 || options.restarts == 0) {
    fail(ErrorKind::validation, "cayley ascent needs at least one step and one restart");
  }
  if (!(options.step_size > 0.0)) fail(ErrorKind::validation, "cayley step size must be positive");
  require_closed_form_shape(m, closed_form_p);

  const double scale = std::max(m.frobenius_norm(), std::numeric_limits<double>::min());
  const double stop = 1e-14 * std::max(1.0, scale);
  const std::size_t sign_bits = std::min<std::size_t>(d, 4);
  const std::size_t patterns = std::size_t{1} << sign_bits;

  Rng rng(options.seed);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;

  for (std::size_t restart = 0; restart < options.restarts; ++restart) {
    const std::size_t pattern = restart % patterns;
    std::vector<double> signs(d, 1.0);
    for (std::size_t i = 0; i < d; ++i) {
      if (i < sign_bits) {
        signs[i] = (pattern >> i) & 1U ? -1.0 : 1.0;
      } else if (restart > 0) {
        signs[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      }
    }
    Matrix start(d, d);
    if (restart > 0) {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < i; ++j) {
          const double a = 0.5 * rng.normal();
          start(i, j) = a;
          start(j, i) = -a;
        }
    }
    Matrix base = cayley(start) * Matrix::diagonal(signs);
    double value = trace_objective(base, m);
    ++evaluations;

    double eta = options.step_size / scale;
    for (std::size_t step = 0; step < options.steps; ++step) {
      const Matrix n = multiply_transposed(m, base);
      Matrix skew = (n - n.transpose()) * 0.5;
      if (skew.frobenius_norm() <= stop) break;

      bool accepted = false;
      while (!accepted && eta * scale > 1e-18) {
        const Matrix candidate = cayley(skew * -eta) * base;
        const double next = trace_objective(candidate, m);
        ++evaluations;
        if (std::isnan(next)) {
          fail(ErrorKind::ascent, "cayley ascent diverged at step " + std::to_string(step) +
                                      " of restart " + std::to_string(restart));
        }
        if (next >= value) {
          base = candidate;
          value = next;
          eta *= 1.5;
          accepted = true;
        } else {
          eta *= 0.5;
        }
      }
      if (!accepted) break;
    }
    best = std::max(best, value);
  }
  return make_verdict(best, closed_form_p, m, evaluations);
}

OracleVerdict cayley_ascent(const Matrix& m, const CayleyOptions& options) {
  if (!m.is_square()) fail(ErrorKind::dimension, "cayley ascent needs a square matrix");
  return cayley_ascent(m, options, linalg::procrustes_solve(m).p);
}

OracleVerdict cayley_ascent(const Matrix& m, std::size_t steps, double step_size, std::uint64_t seed) {
  return cayley_ascent(m, CayleyOptions{steps, step_size, seed, 8});
}

Matrix finite_diff_grad(const Objective& objective, const Matrix& at, double step) {
  if (!(step > 0.0)) fail(ErrorKind::validation, "finite difference step must be positive");
  Matrix x = at;
  Matrix grad(at.rows(), at.cols());
  for (std::size_t i = 0; i < at.rows(); ++i) {
    for (std::size_t j = 0; j < at.cols(); ++j) {
      const double x0 = at(i, j);
      const double h = step * std::max(1.0, std::abs(x0));
      x(i, j) = x0 + h;
      const double up = objective(x);
      x(i, j) = x0 - h;
      const double down = objective(x);
      x(i, j) = x0;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace oce::oracle
