#ifndef SWELLFLOW_ERRORS_HPP
#define SWELLFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace swellflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Physically inadmissible input (activity <= 0, zero layer thickness, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// A model returned a non-finite value where a finite one is required.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what) : Error(what) {}
};

/// An operation was called outside its contract (missing inputs, wrong
/// species count, an identity applied to a model it does not cover).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// Iterative solver failed to converge; carries a residual history.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::string history)
      : Error(what), history_(std::move(history)) {}
  const std::string& history() const { return history_; }

 private:
  std::string history_;
};

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Bad command line usage (CLI exit code 2).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

}  // namespace swellflow

#endif
