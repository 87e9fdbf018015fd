// SPDX-License-Identifier: Apache-2.0

#include "acpr/error.hpp"

namespace acpr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "configuration error";
    case ErrorKind::argument: return "argument error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::invalid_state: return "invalid state";
    case ErrorKind::protocol: return "protocol violation";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

}  // namespace acpr
