#pragma once

#include <stdexcept>
#include <string>

namespace oce {

enum class ErrorKind {
  dimension,      // shape mismatch or wrong arity
  validation,     // out-of-range argument or non-finite data
  rank,           // no linearly independent columns survive
  degenerate,     // zero-norm neuron or concept column
  singular,       // ill-conditioned system with no regularisation
  io,             // file cannot be opened, read or written
  format,         // malformed container (magic, dtype, shape)
  length,         // payload byte count does not match the header
  version,        // unsupported container version
  config,         // unknown key or unparsable value in a config file
  ascent,         // oracle ascent diverged
  certification,  // post-hoc verification failed
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is what
/// callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace oce
