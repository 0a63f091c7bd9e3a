#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "oce/errors.hpp"
#include "oce/io.hpp"

namespace oce::io {

namespace {

constexpr std::uint8_t kMagic[4] = {'O', 'C', 'E', 'T'};
constexpr std::size_t kFixedHeader = 8;  // magic + version + dtype + ndim

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[offset + i]) << (8 * i);
  }
  return value;
}

std::string printable_magic(std::span<const std::uint8_t> bytes) {
  std::string out;
  for (std::size_t i = 0; i < 4 && i < bytes.size(); ++i) {
    const auto c = static_cast<char>(bytes[i]);
    if (c >= 0x20 && c < 0x7f) {
      out += c;
    } else {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\x%02x", bytes[i]);
      out += buf;
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Matrix& m, Dtype dtype) {
  if (dtype != Dtype::f32 && dtype != Dtype::f64) fail(ErrorKind::validation, "unknown dtype");
  const std::size_t elem = dtype == Dtype::f32 ? 4 : 8;
  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeader + 16 + elem * m.data().size());
  for (std::uint8_t b : kMagic) out.push_back(b);
  put_le<std::uint16_t>(out, kTensorVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(2);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  for (double v : m.data()) {
    if (dtype == Dtype::f64) {
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    } else {
      if (!std::isfinite(v) || std::abs(v) > static_cast<double>(FLT_MAX)) {
        fail(ErrorKind::validation, "value " + std::to_string(v) + " does not fit a 32-bit float");
      }
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

Matrix decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFixedHeader) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
      fail(ErrorKind::format, "bad magic '" + printable_magic(bytes) + "', expected 'OCET'");
    }
    fail(ErrorKind::length, "truncated header: expected at least " + std::to_string(kFixedHeader) +
                                " bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorKind::format, "bad magic '" + printable_magic(bytes) + "', expected 'OCET'");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kTensorVersion) {
    fail(ErrorKind::version, "unsupported OCET version " + std::to_string(version) + ", expected 1");
  }
  const std::uint8_t dtype = bytes[6];
  if (dtype != 1 && dtype != 2) fail(ErrorKind::format, "unknown dtype code " + std::to_string(dtype));
  const std::uint8_t ndim = bytes[7];
  if (ndim == 0 || ndim > 2) {
    fail(ErrorKind::format, "unsupported ndim " + std::to_string(ndim) + " (v1 reads 1 or 2)");
  }
  const std::size_t header = kFixedHeader + 8 * std::size_t{ndim};
  if (bytes.size() < header) {
    fail(ErrorKind::length, "truncated shape: expected at least " + std::to_string(header) +
                                " bytes, got " + std::to_string(bytes.size()));
  }

  std::uint64_t shape[2] = {1, 1};
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    shape[i] = get_le<std::uint64_t>(bytes, kFixedHeader + 8 * i);
    if (shape[i] == 0) fail(ErrorKind::format, "shape has a zero extent");
    if (count > std::numeric_limits<std::uint64_t>::max() / shape[i]) {
      fail(ErrorKind::format, "shape product overflows");
    }
    count *= shape[i];
  }
  const std::uint64_t elem = dtype == 1 ? 4 : 8;
  if (count > (std::numeric_limits<std::uint64_t>::max() - header) / elem) {
    fail(ErrorKind::format, "payload size overflows");
  }
  const std::uint64_t expected = header + count * elem;
  if (bytes.size() != expected) {
    fail(ErrorKind::length, "payload length mismatch: expected " + std::to_string(expected) +
                                " bytes, got " + std::to_string(bytes.size()));
  }

  std::vector<double> data(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t off = header + i * elem;
    data[i] = dtype == 2 ? std::bit_cast<double>(get_le<std::uint64_t>(bytes, off))
                         : static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(bytes, off)));
  }
  if (!all_finite(data)) fail(ErrorKind::validation, "tensor payload contains non-finite values");
  return Matrix(static_cast<std::size_t>(shape[0]), static_cast<std::size_t>(shape[1]), std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorKind::io, "cannot stat '" + path.string() + "': " + ec.message());
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    fail(ErrorKind::io, "short read from '" + path.string() + "'");
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "write to '" + path.string() + "' failed");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_tensor(const std::filesystem::path& path, const Matrix& m, Dtype dtype) {
  write_file(path, encode_tensor(m, dtype));
}

Matrix read_tensor(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return decode_tensor(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace oce::io
