#include "bdp/error.hpp"

namespace bdp {

const char *to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::negative_rate: return "NegativeRate";
  case ErrorCode::invalid_parameter: return "InvalidParameter";
  case ErrorCode::unknown_preset: return "UnknownPreset";
  case ErrorCode::dimension_mismatch: return "DimensionMismatch";
  case ErrorCode::negative_discriminant: return "NegativeDiscriminant";
  case ErrorCode::infeasible: return "Infeasible";
  case ErrorCode::kind_mismatch: return "KindMismatch";
  case ErrorCode::requires_finite: return "RequiresFinite";
  case ErrorCode::epsilon_too_large: return "EpsilonTooLarge";
  case ErrorCode::hypothesis_unmet: return "HypothesisUnmet";
  case ErrorCode::step_failure: return "StepFailure";
  case ErrorCode::truncation_loss: return "TruncationLoss";
  case ErrorCode::out_of_range: return "OutOfRange";
  case ErrorCode::order_violation: return "OrderViolation";
  case ErrorCode::config_error: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

Infeasible::Infeasible(std::string condition, const std::string &detail)
    : Error(ErrorCode::infeasible, "condition (" + condition + ") " + detail),
      condition_(std::move(condition)) {}

} // namespace bdp
