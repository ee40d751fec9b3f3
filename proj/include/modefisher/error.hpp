#pragma once

#include <stdexcept>
#include <string>

namespace modefisher {

enum class ErrorCode {
  InvalidArgument,
  GridTooNarrow,
  NonPowerOfTwo,
  Asymmetry,
  ZeroNorm,
  OutOfGrid,
  DomainNotCovered,
  Instability,
  ContinuumModes,
  IncompatibleGrid,
  NegativeProbability,
  NonSinc,
  BoundaryAbort,
  Io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI and the Python layer can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modefisher
