#include "mmsb/errors.hpp"

namespace mmsb {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotUnitVector: return "NotUnitVector";
    case ErrorCode::NoInitializers: return "NoInitializers";
    case ErrorCode::NonFiniteIterate: return "NonFiniteIterate";
    case ErrorCode::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorCode::DegenerateSeparation: return "DegenerateSeparation";
    case ErrorCode::EmptyCommunity: return "EmptyCommunity";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

const char* to_string(WarningCode c) {
  switch (c) {
    case WarningCode::AmbiguousAlignment: return "AmbiguousAlignment";
    case WarningCode::NotHomophilic: return "NotHomophilic";
    case WarningCode::AssumptionWarning: return "AssumptionWarning";
    case WarningCode::FewInitializers: return "FewInitializers";
  }
  return "UnknownWarning";
}

}  // namespace mmsb
