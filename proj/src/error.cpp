#include "matchlab/error.hpp"

namespace matchlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::index: return "index-error";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::stale_packing: return "stale-packing";
    case ErrorKind::too_large: return "too-large";
    case ErrorKind::unsupported_model: return "unsupported-model";
    case ErrorKind::io: return "io-error";
  }
  return "unknown";
}

}  // namespace matchlab
