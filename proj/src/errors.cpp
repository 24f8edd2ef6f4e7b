#include "cs/errors.hpp"

namespace cs {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CutLocus: return "CutLocus";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::OpenLoop: return "OpenLoop";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonIntegerDefect: return "NonIntegerDefect";
    case ErrorKind::NotFlat: return "NotFlat";
    case ErrorKind::UnsupportedBundle: return "UnsupportedBundle";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::PointMismatch: return "PointMismatch";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NonLiftable: return "NonLiftable";
    case ErrorKind::CornerTooClose: return "CornerTooClose";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace cs
