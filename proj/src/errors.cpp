#include "exclusion_lab/errors.hpp"

namespace exclab {
namespace {

std::string join_issues(const std::vector<FieldIssue>& issues) {
  std::string msg = "invalid input:";
  for (const auto& issue : issues) {
    msg += "\n  " + issue.field + ": " + issue.message;
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldIssue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

const char* to_string(IntegrationFailure f) noexcept {
  switch (f) {
    case IntegrationFailure::StepLimitExceeded: return "StepLimitExceeded";
    case IntegrationFailure::StepUnderflow: return "StepUnderflow";
    case IntegrationFailure::NegativeState: return "NegativeState";
    case IntegrationFailure::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

}  // namespace exclab
