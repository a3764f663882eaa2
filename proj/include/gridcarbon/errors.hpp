#pragma once

#include <stdexcept>
#include <string>

namespace gridcarbon {

enum class ErrorCode {
  CountyHasNoEligibleBus,
  SingularIsland,
  NumericallySingular,
  UnknownBus,
  ImbalancedInjection,
  MalformedProblem,
  InfeasibleBaseCase,
  InfeasibleEvDemand,
  InfeasibleTarget,
  EmptyState,
  IncompleteHistory,
  MissingRegionCurve,
  UnreachableLevel,
  NoVariableRenewables,
  ParseError,
  CrossReferenceError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `code()` identifies the failure class so callers
/// (CLI, sweep driver) can map it to exit codes or per-row status strings.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

/// True for the error classes that mean "the optimization model itself is
/// infeasible" as opposed to bad input or numerical trouble.
bool is_infeasible_model(ErrorCode code);

}  // namespace gridcarbon
