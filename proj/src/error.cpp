#include "graspmc/error.hpp"

namespace graspmc {

const char* errorCodeName(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonSymmetricCovariance: return "NonSymmetricCovariance";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::ZeroQuaternion: return "ZeroQuaternion";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::NoRegions: return "NoRegions";
    case ErrorCode::ZeroCurrentDensity: return "ZeroCurrentDensity";
    case ErrorCode::DemonstrationFailure: return "DemonstrationFailure";
    case ErrorCode::InvalidDemonstration: return "InvalidDemonstration";
    case ErrorCode::MissingSourceModel: return "MissingSourceModel";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace graspmc
