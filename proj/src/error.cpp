#include "clustertail/error.hpp"

namespace clustertail {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::ConfigFormat: return "config_format";
    case ErrorKind::SubcriticalityViolation: return "subcriticality";
    case ErrorKind::DuplicateTailIndex: return "duplicate_tail_index";
    case ErrorKind::ConnectivityViolation: return "connectivity";
    case ErrorKind::EmptySet: return "empty_set";
    case ErrorKind::NegativeCoordinate: return "negative_coordinate";
    case ErrorKind::LPNonConvergence: return "lp_non_convergence";
    case ErrorKind::NoConeIntersects: return "no_cone_intersects";
    case ErrorKind::NonUniqueArgmin: return "non_unique_argmin";
    case ErrorKind::CapExceeded: return "cap_exceeded";
    case ErrorKind::DepthCapExceeded: return "depth_cap_exceeded";
    case ErrorKind::ZeroDelta: return "zero_delta";
    case ErrorKind::DepthZeroType: return "depth_zero_type";
    case ErrorKind::InsufficientHits: return "insufficient_hits";
    case ErrorKind::TooFewSamples: return "too_few_samples";
    case ErrorKind::PreconditionViolation: return "precondition_violation";
  }
  return "unknown";
}

}  // namespace clustertail
