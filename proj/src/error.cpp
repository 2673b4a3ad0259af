#include "cracc/error.hpp"

namespace cracc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidStatusCode: return "InvalidStatusCode";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::NoEventsOfInterest: return "NoEventsOfInterest";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::UndefinedWeight: return "UndefinedWeight";
    case ErrorCode::NoCases: return "NoCases";
    case ErrorCode::NoControls: return "NoControls";
    case ErrorCode::NoPairs: return "NoPairs";
    case ErrorCode::RawMarkerNotAllowed: return "RawMarkerNotAllowed";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ZeroCensoringProbability: return "ZeroCensoringProbability";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> subject)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      subject_(subject) {}

}  // namespace cracc
