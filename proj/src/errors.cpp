#include "oce/errors.hpp"

namespace oce {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::validation: return "validation";
    case ErrorKind::rank: return "rank";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::singular: return "singular";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::length: return "length";
    case ErrorKind::version: return "version";
    case ErrorKind::config: return "config";
    case ErrorKind::ascent: return "ascent";
    case ErrorKind::certification: return "certification";
  }
  return "unknown";
}

}  // namespace oce
