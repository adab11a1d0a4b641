#pragma once

#include <stdexcept>
#include <string>

namespace hpvpinn {

/// Thrown when a caller breaks a documented precondition (bad sizes, ordering, indices).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The selected activation cannot provide the derivatives a residual form needs.
class CapabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem datum (target, forcing, boundary value) evaluated to NaN/Inf.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem name is not in the registry.
class UnknownProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration is structurally valid but inconsistent (e.g. tau_b > 0 with no boundary points).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A loss component or gradient became NaN/Inf. `term()` names the offending component.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(std::string term, const std::string& what)
      : std::runtime_error(what), term_(std::move(term)) {}

  const std::string& term() const noexcept { return term_; }

 private:
  std::string term_;
};

namespace detail {

[[noreturn]] inline void contract_failure(const std::string& msg) { throw ContractViolation(msg); }

}  // namespace detail

#define HPVPINN_EXPECTS(cond, msg)                          \
  do {                                                      \
    if (!(cond)) ::hpvpinn::detail::contract_failure(msg);  \
  } while (false)

}  // namespace hpvpinn
