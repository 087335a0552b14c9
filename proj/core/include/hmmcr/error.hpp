#pragma once

#include <stdexcept>
#include <string>

namespace hmmcr {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotStochastic,
  EnumerationCapExceeded,
  NoSighting,
  Parse,
  ReducedDataUnsupported,
  NonFinitePosterior,
  NotPositiveDefinite,
  InconsistentLatentState,
  ChainTooShort,
  SimulationRejected,
  Io,
};

const char* toString(ErrorKind kind);

/// Error raised by every hmmcr component. `kind()` lets callers branch
/// without matching on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure pinned to a 1-based input line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message);

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace hmmcr
