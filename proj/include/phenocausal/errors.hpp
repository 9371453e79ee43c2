#pragma once

#include <stdexcept>
#include <string>

namespace phenocausal {

/// Precondition or shape violation in caller-supplied data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A graph that was required to be acyclic contains a directed cycle.
class CycleError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Marginalization requested onto a subset that has a hidden common cause.
class SufficiencyViolation : public std::domain_error {
 public:
  SufficiencyViolation(const std::string& hidden_cause, const std::string& what)
      : std::domain_error(what), hidden_cause_(hidden_cause) {}
  const std::string& hidden_cause() const noexcept { return hidden_cause_; }

 private:
  std::string hidden_cause_;
};

class SingularMatrix : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An exhaustive or exact computation would exceed its configured size cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A conditional was needed in a context that has zero probability.
class UndefinedConditional : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace phenocausal
