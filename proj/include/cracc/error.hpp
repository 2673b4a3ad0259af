#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cracc {

enum class ErrorCode {
  EmptySample,
  InvalidStatusCode,
  NonFiniteValue,
  ScoreOutOfRange,
  NoEventsOfInterest,
  InvalidArgument,
  DegenerateNeighborhood,
  UndefinedWeight,
  NoCases,
  NoControls,
  NoPairs,
  RawMarkerNotAllowed,
  SingularFit,
  NonConvergence,
  ZeroCensoringProbability,
  InvalidConfig,
  TooManyFailures,
};

std::string_view to_string(ErrorCode code);

/// Every estimator failure is reported through this type. `subject()` is set
/// when the failure can be pinned to one record (index into the validated,
/// time-sorted sample).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> subject = std::nullopt);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> subject_;
};

}  // namespace cracc
