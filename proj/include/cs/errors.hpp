#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cs {

enum class ErrorKind {
  InvalidArgument,
  CutLocus,
  ArityMismatch,
  DegreeOverflow,
  DegreeMismatch,
  ChartMismatch,
  KindMismatch,
  OpenLoop,
  DimensionMismatch,
  NonIntegerDefect,
  NotFlat,
  UnsupportedBundle,
  NotInvariant,
  NoConvergence,
  PointMismatch,
  HypothesisViolated,
  NonLiftable,
  CornerTooClose,
  ConfigInvalid,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cs
