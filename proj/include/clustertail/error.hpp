#pragma once

#include <stdexcept>
#include <string>

namespace clustertail {

enum class ErrorKind {
  InvalidArgument,
  ConfigFormat,
  SubcriticalityViolation,
  DuplicateTailIndex,
  ConnectivityViolation,
  EmptySet,
  NegativeCoordinate,
  LPNonConvergence,
  NoConeIntersects,
  NonUniqueArgmin,
  CapExceeded,
  DepthCapExceeded,
  ZeroDelta,
  DepthZeroType,
  InsufficientHits,
  TooFewSamples,
  PreconditionViolation,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so front ends can map it
// to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace clustertail
