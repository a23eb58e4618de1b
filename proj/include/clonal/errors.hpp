// Exception hierarchy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace clonal {

// Base class for all library-specific failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input outside a formula's domain of validity (e.g. b = d where a closed
// form requires b != d).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// A two-type equilibrium was required but does not exist.
class PairInfeasibleError : public Error {
 public:
  explicit PairInfeasibleError(const std::string& what) : Error(what) {}
};

// Non-generic parameter configuration (vanishing denominator / zero sign).
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(what) {}
};

// Construction parameters violate the cycle-construction preconditions.
class InvalidEtaError : public Error {
 public:
  explicit InvalidEtaError(const std::string& what) : Error(what) {}
};

// A sign pattern required by a criterion does not hold.
class WrongSignPatternError : public Error {
 public:
  explicit WrongSignPatternError(const std::string& what) : Error(what) {}
};

// Numerical routine did not reach its goal within its budget.
class NotSettledError : public Error {
 public:
  explicit NotSettledError(const std::string& what) : Error(what) {}
};

// Adaptive step-size controller could not meet the error tolerance.
class StepFailureError : public Error {
 public:
  explicit StepFailureError(const std::string& what) : Error(what) {}
};

// Requested measurement cannot be extracted from a recorded trajectory.
class InsufficientRecordingError : public Error {
 public:
  explicit InsufficientRecordingError(const std::string& what) : Error(what) {}
};

// Configuration file / experiment specification problems.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// The resident type cannot sustain a population (nbar_0 <= 0).
class NonviableResidentError : public Error {
 public:
  explicit NonviableResidentError(const std::string& what) : Error(what) {}
};

// Rejection sampling exhausted its attempt budget.
class RejectionBudgetError : public Error {
 public:
  explicit RejectionBudgetError(const std::string& what) : Error(what) {}
};

// A sign pattern matched no leaf of a decision table (generic parameters
// should always match exactly one).
class UnhandledCaseError : public Error {
 public:
  explicit UnhandledCaseError(const std::string& what) : Error(what) {}
};

// Parameters do not satisfy the sign/ordering block of the requested case.
class CaseMismatchError : public Error {
 public:
  explicit CaseMismatchError(const std::string& what) : Error(what) {}
};

// A prediction's hypothesis list fails; the message names the first
// violated inequality.
class ConditionsFailError : public Error {
 public:
  explicit ConditionsFailError(const std::string& what) : Error(what) {}
};

// Malformed expression text or evaluation against an unknown variable.
class ExprError : public Error {
 public:
  explicit ExprError(const std::string& what) : Error(what) {}
};

}  // namespace clonal
