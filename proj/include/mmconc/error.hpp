#pragma once

#include <stdexcept>
#include <string>

namespace mmconc {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  MassNotOne,
  NotAMetric,
  SolverFailure,
  TooLarge,
  BadWitness,
  BadFamily,
  NotLipschitzOnS,
  BoundExceeded,
  Infeasible,
  NotDominated,
  MapMismatch,
  BadElement,
  NotHomomorphism,
  NotAGroup,
  NotInvariant,
  BadPoint,
  EmptySet,
  UnknownGenerator,
  ConfigError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI's exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mmconc
