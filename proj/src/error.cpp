#include "mmconc/error.hpp"

namespace mmconc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MassNotOne: return "MassNotOne";
    case ErrorKind::NotAMetric: return "NotAMetric";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadWitness: return "BadWitness";
    case ErrorKind::BadFamily: return "BadFamily";
    case ErrorKind::NotLipschitzOnS: return "NotLipschitzOnS";
    case ErrorKind::BoundExceeded: return "BoundExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NotDominated: return "NotDominated";
    case ErrorKind::MapMismatch: return "MapMismatch";
    case ErrorKind::BadElement: return "BadElement";
    case ErrorKind::NotHomomorphism: return "NotHomomorphism";
    case ErrorKind::NotAGroup: return "NotAGroup";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::BadPoint: return "BadPoint";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace mmconc
