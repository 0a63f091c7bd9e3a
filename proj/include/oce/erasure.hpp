#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "oce/linalg.hpp"
#include "oce/matrix.hpp"

namespace oce::erasure {

/// Embedding bundles for one erasure task. Columns are text embeddings of
/// dimension d_text. `erase` and `anchor` are paired column by column.
class ConceptSets {
 public:
  ConceptSets(Matrix erase, Matrix anchor, std::optional<Matrix> neighbor = std::nullopt,
              std::vector<std::string> labels = {});

  const Matrix& erase() const { return erase_; }
  const Matrix& anchor() const { return anchor_; }
  const std::optional<Matrix>& neighbor() const { return neighbor_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t text_dim() const { return erase_.rows(); }

 private:
  Matrix erase_;
  Matrix anchor_;
  std::optional<Matrix> neighbor_;
  std::vector<std::string> labels_;
};

enum class Normalization { mean, sum };
const char* to_string(Normalization n);
Normalization parse_normalization(const std::string& text);

/// Second-moment matrix of a generic token corpus, shared by all erasure
/// tasks on the same text encoder.
struct PreservationPrior {
  Matrix k0;
  std::size_t token_count = 0;   // 0 when loaded without provenance
  Normalization normalization = Normalization::mean;
};

/// Weights on the erasure, generic-preservation and neighbour terms.
struct Lambdas {
  double erase = 900.0;
  double generic = 50.0;
  double neighbor = 3.0;

  void validate() const;
};

enum class UpdateMode { vector, subspace };
const char* to_string(UpdateMode mode);

struct OrthogonalUpdate {
  Matrix p;
  UpdateMode mode = UpdateMode::subspace;
  double achieved_trace = 0.0;
  double nuclear_norm = 0.0;
  double orth_residual = 0.0;
  std::size_t rank_of_m = 0;
  std::vector<double> sigma;
};

/// Target projector R and anchor projector R* in the output space of W.
struct SubspacePair {
  Matrix target;
  Matrix anchor;
  std::size_t target_rank = 0;
  std::size_t anchor_rank = 0;
};

/// k0 = (1/N) sum c c^T (mean) or sum c c^T (sum) over the token columns.
PreservationPrior build_prior(const Matrix& tokens, Normalization normalization = Normalization::mean);

/// Wraps a loaded k0 after checking it is square, symmetric and PSD.
PreservationPrior prior_from_matrix(Matrix k0, std::size_t token_count = 0,
                                    Normalization normalization = Normalization::mean);

/// Vector-wise cross-covariance in the trace(P^T M) convention:
/// M = W (l_e C* C1^T + l_0 K0 + l_r Cn Cn^T) W^T.
Matrix assemble_vector_m(const Matrix& w, const ConceptSets& sets,
                         const std::optional<PreservationPrior>& prior, const Lambdas& lambdas);

/// Normalises the columns of W C1 and W C*, orthonormalises them and forms
/// both projectors.
SubspacePair build_subspace_pair(const Matrix& w, const ConceptSets& sets,
                                 double drop_tol = linalg::kDefaultDropTol);

/// Unweighted suppression term M_e = -(I - R*) R.
Matrix erasure_term(const SubspacePair& pair);

/// Unweighted preservation term W (l_0 K0 + l_r Cn Cn^T) W^T, exactly symmetric.
/// Returns nullopt when both contributions are absent.
std::optional<Matrix> preservation_term(const Matrix& w, const ConceptSets& sets,
                                        const std::optional<PreservationPrior>& prior,
                                        const Lambdas& lambdas);

/// M_total = -l_e (I - R*) R + W (l_0 K0 + l_r Cn Cn^T) W^T.
Matrix assemble_subspace_m(const Matrix& w, const SubspacePair& pair, const ConceptSets& sets,
                           const std::optional<PreservationPrior>& prior, const Lambdas& lambdas);

/// Closed-form orthogonal maximiser of trace(P^T M) with diagnostics.
OrthogonalUpdate solve_orthogonal(const Matrix& m, UpdateMode mode);

inline constexpr double kMaxGramCondition = 1e12;

/// Condition number of a symmetric PSD matrix (inf when singular).
double condition_number(const Matrix& symmetric);

/// Additive closed form W (C* C1^T + S0 + eps I)(C1 C1^T + S0 + eps I)^-1,
/// the stationary point of ||W' C1 - W C*||^2 + ||W' C0 - W C0||^2
/// + eps ||W' - W||^2, with S0 = C0 C0^T.
Matrix erase_additive(const Matrix& w, const ConceptSets& sets, const std::optional<Matrix>& retain,
                      double damping = 0.0);

/// Same closed form with the retain second moment S0 given directly (e.g. a
/// precomputed K0 plus Cn Cn^T).
Matrix erase_additive_moment(const Matrix& w, const ConceptSets& sets,
                             const std::optional<Matrix>& retain_moment, double damping = 0.0);

/// P * W.
Matrix apply_update(const Matrix& w, const OrthogonalUpdate& update);

}  // namespace oce::erasure
