#include "oce/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oce/erasure.hpp"
#include "oce/geometry.hpp"
#include "oce/io.hpp"
#include "oce/linalg.hpp"
#include "oce/oracle.hpp"
#include "oce/synth.hpp"

namespace oce::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kVerifyOrthTolerance = 1e-9;      // scaled by sqrt(d)
constexpr double kVerifyTraceTolerance = 1e-8;     // scaled by max(1, nuclear norm)
constexpr double kVerifyOracleTolerance = 1e-6;    // scaled by max(1, best)

std::string command_echo(const std::vector<std::string>& args) {
  std::string out = "oce";
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  return out;
}

std::string sidecar(const std::string& out_path) { return out_path + ".report"; }

void add_drift(io::Report& r, const geometry::GeometryDrift& d) {
  r.add("max_magnitude_rel_delta", d.max_magnitude_rel_delta);
  r.add("max_direction_angle", d.max_direction_angle);
  r.add("max_cosine_delta", d.max_cosine_delta);
  r.add("energy_rel_delta", d.energy_rel_delta);
  r.add("clamped_pairs", d.clamped_pairs);
}

void emit(const io::Report& r, std::ostream& out, const std::optional<std::string>& out_path) {
  const std::string text = r.str();
  out << text;
  if (out_path) io::write_text(sidecar(*out_path), text);
}

// Flags that override config values when given.
struct Overrides {
  std::string mode;
  double lambda_e = 0.0;
  double lambda_0 = 0.0;
  double lambda_r = 0.0;
  double damping = 0.0;
  double drop_tol = 0.0;
  std::uint64_t seed = 0;
  std::string config;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* lambda_e_opt = nullptr;
  CLI::Option* lambda_0_opt = nullptr;
  CLI::Option* lambda_r_opt = nullptr;
  CLI::Option* damping_opt = nullptr;
  CLI::Option* drop_tol_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* config_opt = nullptr;

  void attach(CLI::App* app) {
    mode_opt = app->add_option("--mode", mode, "additive | vector | subspace");
    lambda_e_opt = app->add_option("--lambda-e", lambda_e, "erasure weight");
    lambda_0_opt = app->add_option("--lambda-0", lambda_0, "generic preservation weight");
    lambda_r_opt = app->add_option("--lambda-r", lambda_r, "neighbour preservation weight");
    damping_opt = app->add_option("--damping", damping, "Tikhonov damping (additive mode)");
    drop_tol_opt = app->add_option("--drop-tol", drop_tol, "Gram-Schmidt drop tolerance");
    seed_opt = app->add_option("--seed", seed, "random seed");
    config_opt = app->add_option("--config", config, "key = value run config");
  }

  io::RunConfig resolve() const {
    io::RunConfig cfg = config_opt->count() ? io::read_config(config) : io::RunConfig{};
    if (mode_opt->count()) cfg.mode = io::parse_mode(mode);
    if (lambda_e_opt->count()) cfg.lambdas.erase = lambda_e;
    if (lambda_0_opt->count()) cfg.lambdas.generic = lambda_0;
    if (lambda_r_opt->count()) cfg.lambdas.neighbor = lambda_r;
    if (damping_opt->count()) cfg.damping = damping;
    if (drop_tol_opt->count()) cfg.drop_tol = drop_tol;
    if (seed_opt->count()) cfg.seed = seed;
    cfg.validate();
    return cfg;
  }
};

// ---------------------------------------------------------------- prior

struct PriorArgs {
  std::string embeddings;
  std::string out;
  std::string normalization = "mean";
};

int cmd_prior(const PriorArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto norm_mode = erasure::parse_normalization(a.normalization);
  const Matrix tokens = io::read_tensor(a.embeddings);
  const erasure::PreservationPrior prior = erasure::build_prior(tokens, norm_mode);
  io::write_tensor(a.out, prior.k0);

  io::Report r;
  r.add("command", command_echo(args));
  r.add("digest_embeddings", io::file_digest(a.embeddings));
  r.add("normalization", erasure::to_string(prior.normalization));
  r.add("token_count", static_cast<std::uint64_t>(prior.token_count));
  r.add("shape_weights", prior.k0.shape_string());
  emit(r, out, a.out);
  return kExitOk;
}

// ---------------------------------------------------------------- erase

struct EraseArgs {
  std::string weights;
  std::string erase;
  std::string anchor;
  std::string neighbor;
  std::string prior;
  std::string out;
  std::string apply_out;
  std::string m_out;
  bool timing = false;
  Overrides overrides;
};

void check_shapes(const Matrix& w, const Matrix& erase, const Matrix& anchor,
                  const std::optional<Matrix>& neighbor, const std::optional<Matrix>& k0) {
  const std::size_t d_text = w.cols();
  bool ok = erase.rows() == d_text && anchor.rows() == d_text && erase.cols() == anchor.cols();
  if (neighbor) ok = ok && neighbor->rows() == d_text;
  if (k0) ok = ok && k0->rows() == d_text && k0->cols() == d_text;
  if (ok) return;
  std::string msg = "inconsistent shapes: weights " + w.shape_string() + ", erase " + erase.shape_string() +
                    ", anchor " + anchor.shape_string();
  if (neighbor) msg += ", neighbor " + neighbor->shape_string();
  if (k0) msg += ", prior " + k0->shape_string();
  msg += " (expected erase/anchor d_text x N with equal N, neighbor d_text x Nn, prior d_text x d_text)";
  fail(ErrorKind::dimension, msg);
}

int cmd_erase(const EraseArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const io::RunConfig cfg = a.overrides.resolve();

  const Matrix w = io::read_tensor(a.weights);
  Matrix erase = io::read_tensor(a.erase);
  Matrix anchor = io::read_tensor(a.anchor);
  std::optional<Matrix> neighbor;
  if (!a.neighbor.empty()) neighbor = io::read_tensor(a.neighbor);
  const std::string prior_path = !a.prior.empty() ? a.prior : cfg.prior_path.value_or("");
  std::optional<Matrix> k0;
  if (!prior_path.empty()) k0 = io::read_tensor(prior_path);
  check_shapes(w, erase, anchor, neighbor, k0);

  const erasure::ConceptSets sets(std::move(erase), std::move(anchor), neighbor);
  std::optional<erasure::PreservationPrior> prior;
  if (k0) prior = erasure::prior_from_matrix(*k0);

  io::Report r;
  r.add("command", command_echo(args));
  r.add("digest_weights", io::file_digest(a.weights));
  r.add("digest_erase", io::file_digest(a.erase));
  r.add("digest_anchor", io::file_digest(a.anchor));
  if (neighbor) r.add("digest_neighbor", io::file_digest(a.neighbor));
  if (prior) r.add("digest_prior", io::file_digest(prior_path));
  r.add("shape_weights", w.shape_string());
  io::add_config(r, cfg);

  std::optional<Matrix> edited;
  std::optional<Matrix> m_total;
  if (cfg.mode == io::EraseMode::additive) {
    std::optional<Matrix> moment;
    if (prior) moment = prior->k0;
    if (neighbor) moment = moment ? *moment + gram(*neighbor) : gram(*neighbor);
    Matrix gram_total = gram(sets.erase()) + Matrix::identity(sets.text_dim()) * cfg.damping;
    if (moment) gram_total += *moment;
    r.add("gram_condition", erasure::condition_number(gram_total));
    edited = erasure::erase_additive_moment(w, sets, moment, cfg.damping);
    io::write_tensor(a.out, *edited);
  } else {
    const bool subspace = cfg.mode == io::EraseMode::subspace;
    Matrix m(1, 1);
    double erasure_trace = 0.0;
    if (subspace) {
      const erasure::SubspacePair pair = erasure::build_subspace_pair(w, sets, cfg.drop_tol);
      m = erasure::assemble_subspace_m(w, pair, sets, prior, cfg.lambdas);
      r.add("target_rank", static_cast<std::uint64_t>(pair.target_rank));
      r.add("anchor_rank", static_cast<std::uint64_t>(pair.anchor_rank));
      const erasure::OrthogonalUpdate u = erasure::solve_orthogonal(m, erasure::UpdateMode::subspace);
      erasure_trace = frobenius_inner(u.p, erasure::erasure_term(pair));
      edited = erasure::apply_update(w, u);
      r.add("achieved_trace", u.achieved_trace);
      r.add("nuclear_norm", u.nuclear_norm);
      r.add("orth_residual", u.orth_residual);
      r.add("rank_of_m", static_cast<std::uint64_t>(u.rank_of_m));
      r.add("erasure_trace", erasure_trace);
      r.add("identity_deviation", (u.p - Matrix::identity(u.p.rows())).frobenius_norm());
      io::write_tensor(a.out, u.p);
    } else {
      m = erasure::assemble_vector_m(w, sets, prior, cfg.lambdas);
      const erasure::OrthogonalUpdate u = erasure::solve_orthogonal(m, erasure::UpdateMode::vector);
      const Matrix cross = multiply_transposed(w * sets.anchor(), w * sets.erase());
      erasure_trace = frobenius_inner(u.p, cross);
      edited = erasure::apply_update(w, u);
      r.add("achieved_trace", u.achieved_trace);
      r.add("nuclear_norm", u.nuclear_norm);
      r.add("orth_residual", u.orth_residual);
      r.add("rank_of_m", static_cast<std::uint64_t>(u.rank_of_m));
      r.add("erasure_trace", erasure_trace);
      r.add("identity_deviation", (u.p - Matrix::identity(u.p.rows())).frobenius_norm());
      io::write_tensor(a.out, u.p);
    }
    m_total = std::move(m);
  }
  if (!a.apply_out.empty()) io::write_tensor(a.apply_out, *edited);
  if (m_total && !a.m_out.empty()) io::write_tensor(a.m_out, *m_total);
  add_drift(r, geometry::compare(w, *edited));
  if (a.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    r.add("wall_time_ms", std::chrono::duration<double, std::milli>(elapsed).count());
  }
  emit(r, out, a.out);
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string a;
  std::string b;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const Matrix wa = io::read_tensor(a.a);
  const Matrix wb = io::read_tensor(a.b);
  io::Report r;
  r.add("digest_a", io::file_digest(a.a));
  r.add("digest_b", io::file_digest(a.b));
  r.add("shape_weights", wa.shape_string());
  add_drift(r, geometry::compare(wa, wb));
  emit(r, out, std::nullopt);
  return kExitOk;
}

// ---------------------------------------------------------------- toy

struct ToyArgs {
  std::string which;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  std::string weights;
  std::string rotation;
  std::string out;
};

int cmd_toy(const ToyArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const Matrix w = io::read_tensor(a.weights);
  io::Report r;
  r.add("command", command_echo(args));
  r.add("digest_weights", io::file_digest(a.weights));
  r.add("case", a.which);

  std::optional<Matrix> transformed;
  if (a.which == "scale") {
    r.add("alpha", a.alpha);
    transformed = geometry::transform_case_a(w, a.alpha);
  } else if (a.which == "neuron-rot") {
    r.add("seed", a.seed);
    transformed = geometry::transform_case_b(w, a.seed);
  } else {
    Matrix q = a.rotation.empty() ? linalg::random_orthogonal(w.rows(), a.seed) : io::read_tensor(a.rotation);
    if (a.rotation.empty()) {
      r.add("seed", a.seed);
    } else {
      r.add("digest_rotation", io::file_digest(a.rotation));
    }
    transformed = geometry::transform_case_c(w, q);
  }
  io::write_tensor(a.out, *transformed);
  add_drift(r, geometry::compare(w, *transformed));
  emit(r, out, a.out);
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string p;
  std::string m;
  std::size_t steps = 5000;
  std::uint64_t seed = 0;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const Matrix p = io::read_tensor(a.p);
  if (!p.is_square()) fail(ErrorKind::dimension, "P must be square, got " + p.shape_string());
  const std::size_t d = p.rows();
  std::vector<std::string> failed;

  io::Report r;
  r.add("digest_p", io::file_digest(a.p));
  const double residual = orthogonality_residual(p);
  r.add("orth_residual", residual);
  const bool orth_ok = residual <= kVerifyOrthTolerance * std::sqrt(static_cast<double>(d));
  r.add("check_orthogonality", orth_ok ? "pass" : "fail");
  if (!orth_ok) failed.push_back("orthogonality");

  if (!a.m.empty()) {
    const Matrix m = io::read_tensor(a.m);
    if (m.rows() != d || m.cols() != d) {
      fail(ErrorKind::dimension, "M " + m.shape_string() + " does not match P " + p.shape_string());
    }
    r.add("digest_m", io::file_digest(a.m));
    const double achieved = oracle::trace_objective(p, m);
    double nuclear = 0.0;
    for (double s : linalg::svd(m).sigma) nuclear += s;
    const double trace_gap = std::abs(achieved - nuclear);
    const bool trace_ok = trace_gap <= kVerifyTraceTolerance * std::max(1.0, nuclear);
    r.add("achieved_trace", achieved);
    r.add("nuclear_norm", nuclear);
    r.add("trace_gap", trace_gap);
    r.add("check_trace", trace_ok ? "pass" : "fail");
    if (!trace_ok) failed.push_back("trace");

    if (d <= oracle::kCayleyMaxDim) {
      const oracle::OracleVerdict v = oracle::cayley_ascent(m, oracle::CayleyOptions{a.steps, 0.5, a.seed, 8}, p);
      const bool oracle_ok = v.passes(kVerifyOracleTolerance);
      r.add("oracle_best", v.best_objective);
      r.add("oracle_gap", v.gap);
      r.add("oracle_evaluations", static_cast<std::uint64_t>(v.evaluations));
      r.add("check_oracle", oracle_ok ? "pass" : "fail");
      if (!oracle_ok) failed.push_back("oracle");
    }
  }
  emit(r, out, std::nullopt);
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    err << "certification failed: " << names << '\n';
    return kExitCertification;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  synth::SynthParams params;
  std::vector<double> sweep;
  std::string csv;
  Overrides overrides;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const io::RunConfig cfg = a.overrides.resolve();
  const synth::SynthInstance instance = synth::generate_instance(cfg.seed, a.params);
  const synth::EvalOptions options{cfg.damping, cfg.drop_tol, erasure::Normalization::mean};

  io::Report r;
  r.add("seed", cfg.seed);
  r.add("d_text", static_cast<std::uint64_t>(a.params.d_text));
  r.add("d_out", static_cast<std::uint64_t>(a.params.d_out));
  r.add("n_erase", static_cast<std::uint64_t>(a.params.n_erase));
  r.add("n_neighbor", static_cast<std::uint64_t>(a.params.n_neighbor));
  r.add("n_tokens", static_cast<std::uint64_t>(a.params.n_tokens));
  r.add("anchor_cosine", a.params.anchor_cosine);
  r.add("damping", cfg.damping);
  r.add("drop_tol", cfg.drop_tol);

  if (a.sweep.empty()) {
    synth::add_eval(r, synth::evaluate(instance, cfg.mode, cfg.lambdas, options));
    emit(r, out, std::nullopt);
    return kExitOk;
  }
  const auto reports = synth::sweep_lambda_e(instance, cfg.mode, cfg.lambdas, a.sweep, options);
  for (const auto& e : reports) {
    r.add_comment("sweep lambda_e = " + io::format_double(e.lambdas.erase));
    synth::add_eval(r, e);
  }
  emit(r, out, std::nullopt);
  if (!a.csv.empty()) io::write_text(a.csv, synth::sweep_csv(reports));
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return kExitIo;
    case ErrorKind::singular: return kExitSingular;
    case ErrorKind::certification: return kExitCertification;
    default: return kExitValidation;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form orthogonal concept erasure for projection weights", "oce"};
  app.require_subcommand(1);
  std::function<int()> action;

  PriorArgs prior;
  auto* prior_cmd = app.add_subcommand("prior", "Precompute the preservation prior K0 from token embeddings");
  prior_cmd->add_option("--embeddings", prior.embeddings, "d_text x N token embeddings")->required();
  prior_cmd->add_option("--out", prior.out, "output K0 tensor")->required();
  prior_cmd->add_option("--normalization", prior.normalization, "mean | sum");
  prior_cmd->callback([&] { action = [&] { return cmd_prior(prior, args, out); }; });

  EraseArgs erase;
  auto* erase_cmd = app.add_subcommand("erase", "Solve and apply an erasure update");
  erase_cmd->add_option("--weights", erase.weights, "d_out x d_text projection weights")->required();
  erase_cmd->add_option("--erase", erase.erase, "d_text x N target embeddings")->required();
  erase_cmd->add_option("--anchor", erase.anchor, "d_text x N anchor embeddings")->required();
  erase_cmd->add_option("--neighbor", erase.neighbor, "d_text x Nn neighbour embeddings");
  erase_cmd->add_option("--prior", erase.prior, "K0 tensor");
  erase_cmd->add_option("--out", erase.out, "P (orthogonal modes) or updated weights (additive)")->required();
  erase_cmd->add_option("--apply-out", erase.apply_out, "updated weights P W");
  erase_cmd->add_option("--m-out", erase.m_out, "assembled M (orthogonal modes)");
  erase_cmd->add_flag("--timing", erase.timing, "append wall_time_ms to the report");
  erase.overrides.attach(erase_cmd);
  erase_cmd->callback([&] { action = [&] { return cmd_erase(erase, args, out); }; });

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Geometry drift between two weight matrices");
  analyze_cmd->add_option("a", analyze.a, "reference weights")->required();
  analyze_cmd->add_option("b", analyze.b, "edited weights")->required();
  analyze_cmd->callback([&] { action = [&] { return cmd_analyze(analyze, out); }; });

  ToyArgs toy;
  auto* toy_cmd = app.add_subcommand("toy", "Controlled geometric transforms of a weight matrix");
  toy_cmd->add_option("--case", toy.which, "scale | neuron-rot | layer-rot")
      ->required()
      ->check(CLI::IsMember({"scale", "neuron-rot", "layer-rot"}));
  toy_cmd->add_option("--alpha", toy.alpha, "scale factor in (0, 1]");
  toy_cmd->add_option("--seed", toy.seed, "rotation seed");
  toy_cmd->add_option("--rotation", toy.rotation, "explicit orthogonal Q for layer-rot");
  toy_cmd->add_option("--weights", toy.weights, "input weights")->required();
  toy_cmd->add_option("--out", toy.out, "transformed weights")->required();
  toy_cmd->callback([&] { action = [&] { return cmd_toy(toy, args, out); }; });

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Certify orthogonality and optimality of a solved P");
  verify_cmd->add_option("--p", verify.p, "solved P")->required();
  verify_cmd->add_option("--m", verify.m, "cross-covariance M");
  verify_cmd->add_option("--steps", verify.steps, "oracle ascent steps per restart");
  verify_cmd->add_option("--seed", verify.seed, "oracle restart seed");
  verify_cmd->callback([&] { action = [&] { return cmd_verify(verify, out, err); }; });

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Seeded synthetic benchmark");
  eval_cmd->add_option("--d-text", eval.params.d_text);
  eval_cmd->add_option("--d-out", eval.params.d_out);
  eval_cmd->add_option("--n-erase", eval.params.n_erase);
  eval_cmd->add_option("--n-neighbor", eval.params.n_neighbor);
  eval_cmd->add_option("--n-tokens", eval.params.n_tokens);
  eval_cmd->add_option("--anchor-cosine", eval.params.anchor_cosine);
  eval_cmd->add_option("--sweep-lambda-e", eval.sweep, "lambda_e values to sweep")->delimiter(',');
  eval_cmd->add_option("--csv", eval.csv, "write the sweep grid as CSV");
  eval.overrides.attach(eval_cmd);
  eval_cmd->callback([&] { action = [&] { return cmd_eval(eval, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace oce::cli
