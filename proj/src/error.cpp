#include "modefisher/error.hpp"

namespace modefisher {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::GridTooNarrow: return "grid too narrow";
    case ErrorCode::NonPowerOfTwo: return "non-power-of-two grid";
    case ErrorCode::Asymmetry: return "asymmetric PSF";
    case ErrorCode::ZeroNorm: return "zero norm";
    case ErrorCode::OutOfGrid: return "out of grid";
    case ErrorCode::DomainNotCovered: return "domain not covered";
    case ErrorCode::Instability: return "instability";
    case ErrorCode::ContinuumModes: return "continuum modes";
    case ErrorCode::IncompatibleGrid: return "incompatible grid";
    case ErrorCode::NegativeProbability: return "negative probability";
    case ErrorCode::NonSinc: return "non-sinc PSF";
    case ErrorCode::BoundaryAbort: return "bracket boundary";
    case ErrorCode::Io: return "i/o";
  }
  return "error";
}

}  // namespace modefisher
