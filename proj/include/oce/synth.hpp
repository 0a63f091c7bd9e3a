#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "oce/erasure.hpp"
#include "oce/geometry.hpp"
#include "oce/io.hpp"
#include "oce/matrix.hpp"

namespace oce::synth {

struct SynthParams {
  std::size_t d_text = 32;
  std::size_t d_out = 48;
  std::size_t n_erase = 5;
  std::size_t n_neighbor = 10;
  std::size_t n_tokens = 200;
  double anchor_cosine = 0.5;

  void validate() const;
};

struct SynthInstance {
  Matrix weights;           // d_out x d_text, standard Gaussian
  erasure::ConceptSets sets;
  Matrix generic_tokens;    // d_text x n_tokens, unit columns
  std::uint64_t seed = 0;
};

/// Seeded random instance. Targets, neighbours and tokens are unit Gaussian
/// directions; each anchor is cos * target + sin * (unit direction orthogonal
/// to the target), so every pair has cosine `anchor_cosine`.
SynthInstance generate_instance(std::uint64_t seed, const SynthParams& params = {});

struct EvalOptions {
  double damping = 0.0;
  double drop_tol = 1e-8;
  erasure::Normalization normalization = erasure::Normalization::mean;
};

struct EvalReport {
  io::EraseMode mode = io::EraseMode::subspace;
  erasure::Lambdas lambdas;
  double residual_outside_anchor_before = 0.0;
  double residual_outside_anchor_after = 0.0;
  double mean_preservation_cosine = 0.0;
  geometry::GeometryDrift drift;
  // Orthogonal modes only; zero for additive.
  double achieved_trace = 0.0;
  double nuclear_norm = 0.0;
  double orth_residual = 0.0;
  double identity_deviation = 0.0;   // ||P - I||_F
  std::size_t rank_of_m = 0;
};

/// ||(I - R*) U||_F / ||U||_F with U the unit-normalised columns of `mapped`
/// and R* the anchor projector of the original weights.
double residual_outside_anchor(const Matrix& anchor_projector, const Matrix& mapped);

/// Runs one pipeline on the instance and measures anchor residuals of the
/// erase set, preservation cosines of the neighbour set and geometry drift.
EvalReport evaluate(const SynthInstance& instance, io::EraseMode mode, const erasure::Lambdas& lambdas,
                    const EvalOptions& options = {});

/// One evaluation per lambda_e value, other weights fixed.
std::vector<EvalReport> sweep_lambda_e(const SynthInstance& instance, io::EraseMode mode,
                                       const erasure::Lambdas& base, const std::vector<double>& values,
                                       const EvalOptions& options = {});

void add_eval(io::Report& report, const EvalReport& eval);

/// CSV grid: header row then one line per report.
std::string sweep_csv(const std::vector<EvalReport>& reports);

}  // namespace oce::synth
