#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcsynth {

enum class ErrorCode {
  MalformedName,
  RuleViolation,
  InvalidSpec,
  QuotaDomain,
  EmptySide,
  NotBypass,
  GenerationInvariantBroken,
  UnvalidatedGraph,
  ProfileInvalid,
  EmissionFailed,
  WorkdirConflict,
  InvalidBenchmark,
  PlanInvalid,
  BackendError,
  MetricUnavailable,
  UnparseableReport,
  MissingStatistic,
  UnboundPlaceholder,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure carries one of the codes above so
/// callers (the CLI, the bindings) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcsynth
