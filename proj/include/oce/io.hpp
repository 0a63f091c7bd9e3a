#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oce/erasure.hpp"
#include "oce/matrix.hpp"

namespace oce::io {

// OCET tensor container, all integers little-endian:
//
//   offset  size       field
//   0       4          magic "OCET"
//   4       2          version (u16) = 1
//   6       1          dtype (u8): 1 = f32, 2 = f64
//   7       1          ndim (u8)
//   8       8 * ndim   shape (u64 each)
//   ...                row-major payload
//
// Matrices are written with ndim = 2. On read, ndim = 1 yields a column.

inline constexpr std::uint16_t kTensorVersion = 1;

enum class Dtype : std::uint8_t { f32 = 1, f64 = 2 };

std::vector<std::uint8_t> encode_tensor(const Matrix& m, Dtype dtype = Dtype::f64);
Matrix decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Matrix& m, Dtype dtype = Dtype::f64);
Matrix read_tensor(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

enum class EraseMode { additive, vector, subspace };
const char* to_string(EraseMode mode);
EraseMode parse_mode(const std::string& text);

struct RunConfig {
  EraseMode mode = EraseMode::subspace;
  erasure::Lambdas lambdas;   // defaults (900, 50, 3)
  double damping = 0.0;
  double drop_tol = 1e-8;
  std::optional<std::string> prior_path;
  std::uint64_t seed = 0;

  /// Mode-specific checks: lambdas valid, drop_tol > 0, damping >= 0 and
  /// only non-zero in additive mode.
  void validate() const;
};

/// Keys a config file may set.
const std::set<std::string>& config_keys();
/// Keys that only appear in run reports; accepted and ignored by the config
/// reader so a report can be replayed as a config.
const std::set<std::string>& report_only_keys();

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and bad
/// values raise config errors naming the line.
RunConfig parse_config(const std::string& text);
RunConfig read_config(const std::filesystem::path& path);

/// Ordered `key = value` report. Doubles use shortest round-trip formatting
/// so identical runs print identical bytes.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, double value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, int value) { add(key, static_cast<std::uint64_t>(value)); }
  void add_comment(const std::string& text);

  std::string str() const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> lines_;
};

std::string format_double(double v);

/// Parses any `key = value` text (reports included) into ordered pairs.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

void add_config(Report& report, const RunConfig& config);

/// Hex SHA-256 of a byte buffer / file.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace oce::io
