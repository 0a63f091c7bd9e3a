#include "oce/erasure.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "eigen_bridge.hpp"
#include "oce/errors.hpp"

namespace oce::erasure {

namespace {

void require_nonzero_columns(const Matrix& m, const char* what) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (norm(m.column(j)) == 0.0) {
      fail(ErrorKind::degenerate, std::string(what) + " column " + std::to_string(j) + " has zero norm");
    }
  }
}

void require_text_dim(const Matrix& w, const ConceptSets& sets) {
  if (w.cols() != sets.text_dim()) {
    fail(ErrorKind::dimension, "weights " + w.shape_string() + " do not accept embeddings of dimension " +
                                   std::to_string(sets.text_dim()));
  }
}

void require_prior_dim(const std::optional<PreservationPrior>& prior, std::size_t d_text) {
  if (prior && (prior->k0.rows() != d_text || prior->k0.cols() != d_text)) {
    fail(ErrorKind::dimension, "prior " + prior->k0.shape_string() + " does not match text dimension " +
                                   std::to_string(d_text));
  }
}

// Unit-normalises every column; a zero column is a degenerate concept.
Matrix normalized_columns(Matrix m, const char* what) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::vector<double> col = m.column(j);
    const double n = norm(col);
    if (n == 0.0) {
      fail(ErrorKind::degenerate,
           std::string(what) + " concept " + std::to_string(j) + " maps to the zero vector under W");
    }
    for (double& x : col) x /= n;
    m.set_column(j, col);
  }
  return m;
}

Matrix apply_symmetric_or_general(const Matrix& w, const Matrix& inner) {
  if (is_exactly_symmetric(inner)) return symmetric_sandwich(w, inner);
  return multiply_transposed(w * inner, w);
}

}  // namespace

ConceptSets::ConceptSets(Matrix erase, Matrix anchor, std::optional<Matrix> neighbor,
                         std::vector<std::string> labels)
    : erase_(std::move(erase)),
      anchor_(std::move(anchor)),
      neighbor_(std::move(neighbor)),
      labels_(std::move(labels)) {
  if (anchor_.rows() != erase_.rows() || anchor_.cols() != erase_.cols()) {
    fail(ErrorKind::dimension, "erase " + erase_.shape_string() + " and anchor " +
                                   anchor_.shape_string() + " must pair column by column");
  }
  if (neighbor_ && neighbor_->rows() != erase_.rows()) {
    fail(ErrorKind::dimension, "neighbor " + neighbor_->shape_string() +
                                   " has a different embedding dimension than erase " +
                                   erase_.shape_string());
  }
  require_nonzero_columns(erase_, "erase");
  require_nonzero_columns(anchor_, "anchor");
  if (neighbor_) require_nonzero_columns(*neighbor_, "neighbor");
}

const char* to_string(Normalization n) { return n == Normalization::mean ? "mean" : "sum"; }

Normalization parse_normalization(const std::string& text) {
  if (text == "mean") return Normalization::mean;
  if (text == "sum") return Normalization::sum;
  fail(ErrorKind::validation, "normalization must be 'mean' or 'sum', got '" + text + "'");
}

const char* to_string(UpdateMode mode) { return mode == UpdateMode::vector ? "vector" : "subspace"; }

void Lambdas::validate() const {
  for (double l : {erase, generic, neighbor}) {
    if (!std::isfinite(l) || l < 0.0) {
      fail(ErrorKind::validation, "lambda weights must be finite and non-negative");
    }
  }
  if (erase == 0.0 && generic == 0.0 && neighbor == 0.0) {
    fail(ErrorKind::validation, "lambda weights are all zero");
  }
}

PreservationPrior build_prior(const Matrix& tokens, Normalization normalization) {
  // Matrix cannot be empty, so N >= 1 holds by construction; the check below
  // guards callers that pass a placeholder column.
  const std::size_t n = tokens.cols();
  if (n == 0) fail(ErrorKind::validation, "empty token corpus");
  Matrix k0 = gram(tokens);
  if (normalization == Normalization::mean) k0 *= 1.0 / static_cast<double>(n);
  return {std::move(k0), n, normalization};
}

PreservationPrior prior_from_matrix(Matrix k0, std::size_t token_count, Normalization normalization) {
  if (!k0.is_square()) fail(ErrorKind::dimension, "prior must be square, got " + k0.shape_string());
  const double scale = k0.frobenius_norm();
  if ((k0 - k0.transpose()).frobenius_norm() > 1e-12 * scale) {
    fail(ErrorKind::validation, "prior matrix is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<detail::RowMajor> eig(detail::view(k0), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
    fail(ErrorKind::validation, "prior matrix is not positive semidefinite");
  }
  return {std::move(k0), token_count, normalization};
}

Matrix assemble_vector_m(const Matrix& w, const ConceptSets& sets,
                         const std::optional<PreservationPrior>& prior, const Lambdas& lambdas) {
  lambdas.validate();
  require_text_dim(w, sets);
  require_prior_dim(prior, sets.text_dim());

  const std::size_t d_text = sets.text_dim();
  Matrix inner(d_text, d_text);
  bool active = false;
  if (lambdas.erase > 0.0) {
    // C* C1^T; taken through gram when the pair coincides so the result stays
    // exactly symmetric.
    Matrix cross = sets.anchor() == sets.erase() ? gram(sets.erase())
                                                 : multiply_transposed(sets.anchor(), sets.erase());
    inner += cross * lambdas.erase;
    active = true;
  }
  if (prior && lambdas.generic > 0.0) {
    inner += prior->k0 * lambdas.generic;
    active = true;
  }
  if (sets.neighbor() && lambdas.neighbor > 0.0) {
    inner += gram(*sets.neighbor()) * lambdas.neighbor;
    active = true;
  }
  if (!active) fail(ErrorKind::validation, "empty objective: no weighted term has data");
  return apply_symmetric_or_general(w, inner);
}

SubspacePair build_subspace_pair(const Matrix& w, const ConceptSets& sets, double drop_tol) {
  require_text_dim(w, sets);
  const auto target = linalg::orth(normalized_columns(w * sets.erase(), "erase"), drop_tol);
  const auto anchor = linalg::orth(normalized_columns(w * sets.anchor(), "anchor"), drop_tol);
  return {linalg::projector(target), linalg::projector(anchor), target.rank(), anchor.rank()};
}

Matrix erasure_term(const SubspacePair& pair) {
  // -(I - R*) R = R* R - R
  return pair.anchor * pair.target - pair.target;
}

std::optional<Matrix> preservation_term(const Matrix& w, const ConceptSets& sets,
                                        const std::optional<PreservationPrior>& prior,
                                        const Lambdas& lambdas) {
  require_text_dim(w, sets);
  require_prior_dim(prior, sets.text_dim());
  const std::size_t d_text = sets.text_dim();
  Matrix inner(d_text, d_text);
  bool active = false;
  if (prior && lambdas.generic > 0.0) {
    inner += prior->k0 * lambdas.generic;
    active = true;
  }
  if (sets.neighbor() && lambdas.neighbor > 0.0) {
    inner += gram(*sets.neighbor()) * lambdas.neighbor;
    active = true;
  }
  if (!active) return std::nullopt;
  return symmetric_sandwich(w, inner);
}

Matrix assemble_subspace_m(const Matrix& w, const SubspacePair& pair, const ConceptSets& sets,
                           const std::optional<PreservationPrior>& prior, const Lambdas& lambdas) {
  lambdas.validate();
  if (pair.target.rows() != w.rows() || pair.anchor.rows() != w.rows()) {
    fail(ErrorKind::dimension, "projectors " + pair.target.shape_string() + " / " +
                                   pair.anchor.shape_string() + " do not match weights " +
                                   w.shape_string());
  }
  std::optional<Matrix> preserve = preservation_term(w, sets, prior, lambdas);
  if (lambdas.erase == 0.0) {
    if (!preserve) fail(ErrorKind::validation, "empty objective: no weighted term has data");
    return *preserve;
  }
  Matrix total = erasure_term(pair) * lambdas.erase;
  if (preserve) total += *preserve;
  return total;
}

OrthogonalUpdate solve_orthogonal(const Matrix& m, UpdateMode mode) {
  linalg::ProcrustesSolution s = linalg::procrustes_solve(m);
  return {std::move(s.p), mode,   s.achieved_trace, s.nuclear_norm,
          s.orth_residual, s.rank, std::move(s.sigma)};
}

double condition_number(const Matrix& symmetric) {
  const Eigen::SelfAdjointEigenSolver<detail::RowMajor> eig(detail::view(symmetric),
                                                             Eigen::EigenvaluesOnly);
  const auto abs_values = eig.eigenvalues().cwiseAbs();
  const double lo = abs_values.minCoeff();
  const double hi = abs_values.maxCoeff();
  if (lo == 0.0 || eig.eigenvalues().minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Matrix erase_additive_moment(const Matrix& w, const ConceptSets& sets,
                             const std::optional<Matrix>& retain_moment, double damping) {
  require_text_dim(w, sets);
  if (!std::isfinite(damping) || damping < 0.0) {
    fail(ErrorKind::validation, "damping must be finite and non-negative");
  }
  const std::size_t d_text = sets.text_dim();
  if (retain_moment && (retain_moment->rows() != d_text || retain_moment->cols() != d_text)) {
    fail(ErrorKind::dimension, "retain second moment " + retain_moment->shape_string() +
                                   " does not match text dimension " + std::to_string(d_text));
  }

  Matrix shared = Matrix::identity(d_text) * damping;
  if (retain_moment) shared += *retain_moment;

  const Matrix target_gram = gram(sets.erase());
  const Matrix gram_total = target_gram + shared;
  const Matrix rhs = (sets.anchor() == sets.erase() ? target_gram
                                                     : multiply_transposed(sets.anchor(), sets.erase())) +
                     shared;

  const double cond = condition_number(gram_total);
  if (damping == 0.0 && !(cond <= kMaxGramCondition)) {
    fail(ErrorKind::singular, "Gram matrix is singular or ill-conditioned (condition " +
                                  std::to_string(cond) + "); pass a positive damping");
  }

  // W' G = W rhs  <=>  G W'^T = (W rhs)^T since G is symmetric.
  const Matrix b = w * rhs;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(detail::view(gram_total)));
  const Eigen::MatrixXd xt = lu.solve(Eigen::MatrixXd(detail::view(b).transpose()));
  Matrix out = detail::from_eigen(xt.transpose());
  if (!all_finite(out.data())) fail(ErrorKind::singular, "additive solve produced non-finite weights");
  return out;
}

Matrix erase_additive(const Matrix& w, const ConceptSets& sets, const std::optional<Matrix>& retain,
                      double damping) {
  if (retain && retain->rows() != sets.text_dim()) {
    fail(ErrorKind::dimension, "retain " + retain->shape_string() +
                                   " does not match text dimension " + std::to_string(sets.text_dim()));
  }
  std::optional<Matrix> moment;
  if (retain) moment = gram(*retain);
  return erase_additive_moment(w, sets, moment, damping);
}

Matrix apply_update(const Matrix& w, const OrthogonalUpdate& update) {
  if (!update.p.is_square() || update.p.cols() != w.rows()) {
    fail(ErrorKind::dimension,
         "update " + update.p.shape_string() + " cannot act on weights " + w.shape_string());
  }
  return update.p * w;
}

}  // namespace oce::erasure
