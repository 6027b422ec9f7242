#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mmsb {

enum class ErrorCode {
  NonPositiveAlpha,
  InvalidPrior,
  InvalidProbability,
  DimensionMismatch,
  TooFewNodes,
  OverlappingSets,
  EmptyPartition,
  CapExceeded,
  RankDeficient,
  NotUnitVector,
  NoInitializers,
  NonFiniteIterate,
  NonPositiveEigenvalue,
  DegenerateSeparation,
  EmptyCommunity,
  UnknownPreset,
  IoError,
  BadConfig,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Non-fatal conditions surfaced to the caller instead of aborting a run.
enum class WarningCode {
  AmbiguousAlignment,
  NotHomophilic,
  AssumptionWarning,
  FewInitializers,
};

const char* to_string(WarningCode c);

struct Warning {
  WarningCode code;
  std::string detail;
};

using Warnings = std::vector<Warning>;

}  // namespace mmsb
