#include "hmmcr/error.hpp"

namespace hmmcr {

const char* toString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::NotStochastic: return "matrix is not stochastic";
    case ErrorKind::EnumerationCapExceeded: return "enumeration cap exceeded";
    case ErrorKind::NoSighting: return "history has no sighting";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::ReducedDataUnsupported: return "reduced data unsupported";
    case ErrorKind::NonFinitePosterior: return "non-finite posterior";
    case ErrorKind::NotPositiveDefinite: return "matrix not positive definite";
    case ErrorKind::InconsistentLatentState: return "inconsistent latent state";
    case ErrorKind::ChainTooShort: return "chain too short";
    case ErrorKind::SimulationRejected: return "simulation rejected";
    case ErrorKind::Io: return "i/o error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(int line, const std::string& message)
    : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace hmmcr
