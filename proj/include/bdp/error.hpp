#ifndef BDP_ERROR_HPP
#define BDP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bdp {

enum class ErrorCode {
  negative_rate,
  invalid_parameter,
  unknown_preset,
  dimension_mismatch,
  negative_discriminant,
  infeasible,
  kind_mismatch,
  requires_finite,
  epsilon_too_large,
  hypothesis_unmet,
  step_failure,
  truncation_loss,
  out_of_range,
  order_violation,
  config_error,
};

const char *to_string(ErrorCode code);

/// Base for every error raised by the library. The code is stable and is
/// what the command-line front end maps onto exit statuses.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// A hypothesis of an ergodicity theorem does not hold. `condition()` names
/// the first failed one: "a", "b", "c", "interval", "limits", "finite".
class Infeasible : public Error {
public:
  Infeasible(std::string condition, const std::string &detail);

  const std::string &condition() const noexcept { return condition_; }

private:
  std::string condition_;
};

} // namespace bdp

#endif
