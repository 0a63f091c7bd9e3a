#include "oce/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oce/errors.hpp"
#include "oce/linalg.hpp"
#include "oce/random.hpp"

namespace oce::synth {

namespace {

std::vector<double> unit_gaussian(std::size_t d, Rng& rng) {
  for (;;) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.normal();
    const double n = norm(v);
    if (n > 0.0) {
      for (double& x : v) x /= n;
      return v;
    }
  }
}

Matrix unit_columns(std::size_t d, std::size_t k, Rng& rng) {
  std::vector<std::vector<double>> cols;
  cols.reserve(k);
  for (std::size_t j = 0; j < k; ++j) cols.push_back(unit_gaussian(d, rng));
  return Matrix::from_columns(cols);
}

std::vector<double> anchor_for(const std::vector<double>& target, double cosine, Rng& rng) {
  const std::size_t d = target.size();
  std::vector<double> u;
  for (;;) {
    u = unit_gaussian(d, rng);
    const double h = dot(u, target);
    for (std::size_t i = 0; i < d; ++i) u[i] -= h * target[i];
    const double n = norm(u);
    if (n > 1e-6) {
      for (double& x : u) x /= n;
      break;
    }
  }
  const double sine = std::sqrt(1.0 - cosine * cosine);
  std::vector<double> a(d);
  for (std::size_t i = 0; i < d; ++i) a[i] = cosine * target[i] + sine * u[i];
  const double n = norm(a);
  for (double& x : a) x /= n;
  return a;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const double c = dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace

void SynthParams::validate() const {
  if (d_text < 2 || d_out == 0 || n_erase == 0 || n_neighbor == 0 || n_tokens == 0) {
    fail(ErrorKind::validation, "synthetic sizes must be positive and d_text >= 2");
  }
  if (d_out < n_erase) {
    fail(ErrorKind::validation, "under-determined subspace: d_out (" + std::to_string(d_out) +
                                    ") < n_erase (" + std::to_string(n_erase) + ")");
  }
  if (!(anchor_cosine > -1.0 && anchor_cosine < 1.0)) {
    fail(ErrorKind::validation, "anchor cosine must lie in (-1, 1)");
  }
}

SynthInstance generate_instance(std::uint64_t seed, const SynthParams& params) {
  params.validate();
  Rng rng(seed);

  Matrix weights = linalg::random_normal(params.d_out, params.d_text, rng);

  std::vector<std::vector<double>> targets;
  std::vector<std::vector<double>> anchors;
  for (std::size_t i = 0; i < params.n_erase; ++i) {
    targets.push_back(unit_gaussian(params.d_text, rng));
    anchors.push_back(anchor_for(targets.back(), params.anchor_cosine, rng));
  }
  Matrix neighbor = unit_columns(params.d_text, params.n_neighbor, rng);
  Matrix tokens = unit_columns(params.d_text, params.n_tokens, rng);

  erasure::ConceptSets sets(Matrix::from_columns(targets), Matrix::from_columns(anchors),
                            std::move(neighbor));
  return {std::move(weights), std::move(sets), std::move(tokens), seed};
}

double residual_outside_anchor(const Matrix& anchor_projector, const Matrix& mapped) {
  Matrix unit = mapped;
  for (std::size_t j = 0; j < unit.cols(); ++j) {
    std::vector<double> col = unit.column(j);
    const double n = norm(col);
    if (n == 0.0) fail(ErrorKind::degenerate, "mapped concept " + std::to_string(j) + " is zero");
    for (double& x : col) x /= n;
    unit.set_column(j, col);
  }
  const Matrix outside = unit - anchor_projector * unit;
  return outside.frobenius_norm() / unit.frobenius_norm();
}

EvalReport evaluate(const SynthInstance& instance, io::EraseMode mode, const erasure::Lambdas& lambdas,
                    const EvalOptions& options) {
  const Matrix& w = instance.weights;
  const erasure::ConceptSets& sets = instance.sets;
  const erasure::PreservationPrior prior = erasure::build_prior(instance.generic_tokens, options.normalization);
  const erasure::SubspacePair pair = erasure::build_subspace_pair(w, sets, options.drop_tol);

  EvalReport report;
  report.mode = mode;
  report.lambdas = lambdas;
  report.residual_outside_anchor_before = residual_outside_anchor(pair.anchor, w * sets.erase());

  std::optional<Matrix> edited;
  if (mode == io::EraseMode::additive) {
    Matrix moment = prior.k0;
    if (sets.neighbor()) moment += gram(*sets.neighbor());
    edited = erasure::erase_additive_moment(w, sets, moment, options.damping);
  } else {
    const Matrix m = mode == io::EraseMode::subspace
                         ? erasure::assemble_subspace_m(w, pair, sets, prior, lambdas)
                         : erasure::assemble_vector_m(w, sets, prior, lambdas);
    const erasure::OrthogonalUpdate update = erasure::solve_orthogonal(
        m, mode == io::EraseMode::subspace ? erasure::UpdateMode::subspace : erasure::UpdateMode::vector);
    edited = erasure::apply_update(w, update);
    report.achieved_trace = update.achieved_trace;
    report.nuclear_norm = update.nuclear_norm;
    report.orth_residual = update.orth_residual;
    report.rank_of_m = update.rank_of_m;
    report.identity_deviation = (update.p - Matrix::identity(update.p.rows())).frobenius_norm();
  }

  report.residual_outside_anchor_after = residual_outside_anchor(pair.anchor, *edited * sets.erase());

  const Matrix& retain = *sets.neighbor();
  const Matrix before = w * retain;
  const Matrix after = *edited * retain;
  double total = 0.0;
  for (std::size_t j = 0; j < retain.cols(); ++j) total += cosine(after.column(j), before.column(j));
  report.mean_preservation_cosine = total / static_cast<double>(retain.cols());

  report.drift = geometry::compare(w, *edited);
  return report;
}

std::vector<EvalReport> sweep_lambda_e(const SynthInstance& instance, io::EraseMode mode,
                                       const erasure::Lambdas& base, const std::vector<double>& values,
                                       const EvalOptions& options) {
  std::vector<EvalReport> out;
  out.reserve(values.size());
  for (double v : values) {
    erasure::Lambdas l = base;
    l.erase = v;
    out.push_back(evaluate(instance, mode, l, options));
  }
  return out;
}

void add_eval(io::Report& report, const EvalReport& eval) {
  report.add("mode", io::to_string(eval.mode));
  report.add("lambda_e", eval.lambdas.erase);
  report.add("lambda_0", eval.lambdas.generic);
  report.add("lambda_r", eval.lambdas.neighbor);
  report.add_comment("residual metric: ||(I - R*) normalize(W C1)||_F / ||normalize(W C1)||_F, "
                     "R* from the unedited anchors");
  report.add("residual_outside_anchor_before", eval.residual_outside_anchor_before);
  report.add("residual_outside_anchor_after", eval.residual_outside_anchor_after);
  report.add("mean_preservation_cosine", eval.mean_preservation_cosine);
  if (eval.mode != io::EraseMode::additive) {
    report.add("achieved_trace", eval.achieved_trace);
    report.add("nuclear_norm", eval.nuclear_norm);
    report.add("orth_residual", eval.orth_residual);
    report.add("rank_of_m", eval.rank_of_m);
    report.add("identity_deviation", eval.identity_deviation);
  }
  report.add("max_magnitude_rel_delta", eval.drift.max_magnitude_rel_delta);
  report.add("max_direction_angle", eval.drift.max_direction_angle);
  report.add("max_cosine_delta", eval.drift.max_cosine_delta);
  report.add("energy_rel_delta", eval.drift.energy_rel_delta);
  report.add("clamped_pairs", eval.drift.clamped_pairs);
}

std::string sweep_csv(const std::vector<EvalReport>& reports) {
  std::string out =
      "mode,lambda_e,lambda_0,lambda_r,residual_before,residual_after,mean_preservation_cosine,"
      "max_magnitude_rel_delta,max_direction_angle,max_cosine_delta,energy_rel_delta\n";
  for (const auto& r : reports) {
    const double fields[] = {r.lambdas.erase,
                             r.lambdas.generic,
                             r.lambdas.neighbor,
                             r.residual_outside_anchor_before,
                             r.residual_outside_anchor_after,
                             r.mean_preservation_cosine,
                             r.drift.max_magnitude_rel_delta,
                             r.drift.max_direction_angle,
                             r.drift.max_cosine_delta,
                             r.drift.energy_rel_delta};
    out += io::to_string(r.mode);
    for (double f : fields) {
      out += ',';
      out += io::format_double(f);
    }
    out += '\n';
  }
  return out;
}

}  // namespace oce::synth
