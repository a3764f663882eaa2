#include "gridcarbon/errors.hpp"

namespace gridcarbon {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CountyHasNoEligibleBus: return "CountyHasNoEligibleBus";
    case ErrorCode::SingularIsland: return "SingularIsland";
    case ErrorCode::NumericallySingular: return "NumericallySingular";
    case ErrorCode::UnknownBus: return "UnknownBus";
    case ErrorCode::ImbalancedInjection: return "ImbalancedInjection";
    case ErrorCode::MalformedProblem: return "MalformedProblem";
    case ErrorCode::InfeasibleBaseCase: return "InfeasibleBaseCase";
    case ErrorCode::InfeasibleEvDemand: return "InfeasibleEvDemand";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::EmptyState: return "EmptyState";
    case ErrorCode::IncompleteHistory: return "IncompleteHistory";
    case ErrorCode::MissingRegionCurve: return "MissingRegionCurve";
    case ErrorCode::UnreachableLevel: return "UnreachableLevel";
    case ErrorCode::NoVariableRenewables: return "NoVariableRenewables";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CrossReferenceError: return "CrossReferenceError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

bool is_infeasible_model(ErrorCode code) {
  return code == ErrorCode::InfeasibleBaseCase || code == ErrorCode::InfeasibleEvDemand ||
         code == ErrorCode::InfeasibleTarget;
}

}  // namespace gridcarbon
