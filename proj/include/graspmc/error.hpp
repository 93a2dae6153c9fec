#pragma once

#include <stdexcept>
#include <string>

namespace graspmc {

enum class ErrorCode {
  InvalidArgument = 1,
  NonSymmetricCovariance,
  DecompositionFailure,
  ZeroQuaternion,
  EmptyHistory,
  NoRegions,
  ZeroCurrentDensity,
  DemonstrationFailure,
  InvalidDemonstration,
  MissingSourceModel,
  UnknownObject,
  ParseError,
  IoError,
};

const char* errorCodeName(ErrorCode code) noexcept;

/// Library-wide exception. Every failure the core raises carries one of the
/// ErrorCode values so the C layer can map it to a status without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace graspmc
