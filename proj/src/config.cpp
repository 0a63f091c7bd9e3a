#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "oce/errors.hpp"
#include "oce/io.hpp"

namespace oce::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_snake_case(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::config, "config line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view text, std::size_t line, std::string_view key) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    config_error(line, "cannot parse '" + std::string(text) + "' as a real for " + std::string(key));
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::size_t line, std::string_view key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    config_error(line, "cannot parse '" + std::string(text) + "' as an unsigned integer for " +
                           std::string(key));
  }
  return v;
}

std::string joined(const std::set<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

}  // namespace

const char* to_string(EraseMode mode) {
  switch (mode) {
    case EraseMode::additive: return "additive";
    case EraseMode::vector: return "vector";
    case EraseMode::subspace: return "subspace";
  }
  return "unknown";
}

EraseMode parse_mode(const std::string& text) {
  if (text == "additive") return EraseMode::additive;
  if (text == "vector") return EraseMode::vector;
  if (text == "subspace") return EraseMode::subspace;
  fail(ErrorKind::validation, "unknown mode '" + text + "' (expected additive, vector or subspace)");
}

void RunConfig::validate() const {
  lambdas.validate();
  if (!(drop_tol > 0.0)) fail(ErrorKind::validation, "drop_tol must be positive");
  if (!(damping >= 0.0)) fail(ErrorKind::validation, "damping must be non-negative");
  if (damping != 0.0 && mode != EraseMode::additive) {
    fail(ErrorKind::validation, "damping applies only to additive mode");
  }
}

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {"mode",     "lambda_e", "lambda_0",   "lambda_r",
                                             "damping",  "drop_tol", "prior_path", "seed"};
  return keys;
}

const std::set<std::string>& report_only_keys() {
  static const std::set<std::string> keys = {
      "command",          "digest_weights",       "digest_erase",
      "digest_anchor",    "digest_neighbor",      "digest_prior",
      "digest_embeddings", "digest_a",            "digest_b",
      "digest_p",         "digest_m",             "shape_weights",
      "shape_p",          "normalization",        "token_count",
      "achieved_trace",   "nuclear_norm",         "orth_residual",
      "rank_of_m",        "erasure_trace",        "identity_deviation",
      "gram_condition",   "max_magnitude_rel_delta", "max_direction_angle",
      "max_cosine_delta", "energy_rel_delta",     "clamped_pairs",
      "target_rank",      "anchor_rank",          "wall_time_ms",
      "case",             "alpha",                "digest_rotation",
      "trace_gap",        "check_orthogonality",  "check_trace",
      "check_oracle",     "oracle_best",          "oracle_gap",
      "oracle_evaluations", "d_text",             "d_out",
      "n_erase",          "n_neighbor",           "n_tokens",
      "anchor_cosine",    "residual_outside_anchor_before",
      "residual_outside_anchor_after",            "mean_preservation_cosine"};
  return keys;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::string_view rest(text);
  while (!rest.empty()) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!is_snake_case(key)) config_error(line_no, "key '" + key + "' is not ASCII snake_case");
    if (value.empty()) config_error(line_no, "missing value for " + key);

    if (report_only_keys().count(key) != 0) continue;
    if (key == "mode") {
      try {
        cfg.mode = parse_mode(std::string(value));
      } catch (const Error& e) {
        config_error(line_no, e.what());
      }
    } else if (key == "lambda_e") {
      cfg.lambdas.erase = parse_real(value, line_no, key);
    } else if (key == "lambda_0") {
      cfg.lambdas.generic = parse_real(value, line_no, key);
    } else if (key == "lambda_r") {
      cfg.lambdas.neighbor = parse_real(value, line_no, key);
    } else if (key == "damping") {
      cfg.damping = parse_real(value, line_no, key);
    } else if (key == "drop_tol") {
      cfg.drop_tol = parse_real(value, line_no, key);
    } else if (key == "prior_path") {
      cfg.prior_path = std::string(value);
    } else if (key == "seed") {
      cfg.seed = parse_unsigned(value, line_no, key);
    } else {
      config_error(line_no, "unknown key '" + key + "'; valid keys: " + joined(config_keys()));
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void Report::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
  lines_.push_back(key + " = " + value);
}

void Report::add(const std::string& key, const char* value) { add(key, std::string(value)); }

void Report::add(const std::string& key, double value) { add(key, format_double(value)); }

void Report::add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

void Report::add_comment(const std::string& text) { lines_.push_back("# " + text); }

std::string Report::str() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    const auto eq = line.find('=');
    if (line.empty() || eq == std::string_view::npos) continue;
    out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

void add_config(Report& report, const RunConfig& config) {
  report.add("mode", to_string(config.mode));
  report.add("lambda_e", config.lambdas.erase);
  report.add("lambda_0", config.lambdas.generic);
  report.add("lambda_r", config.lambdas.neighbor);
  report.add("damping", config.damping);
  report.add("drop_tol", config.drop_tol);
  if (config.prior_path) report.add("prior_path", *config.prior_path);
  report.add("seed", config.seed);
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::io, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string file_digest(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

}  // namespace oce::io
