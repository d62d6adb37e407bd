#include "fkdv/errors.hpp"

namespace fkdv {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::GridMismatch: return "grid mismatch";
        case ErrorKind::UnsupportedRegime: return "unsupported regime";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Resolution: return "insufficient resolution";
        case ErrorKind::Contamination: return "periodic contamination";
        case ErrorKind::Instability: return "instability";
        case ErrorKind::NumericalFailure: return "numerical failure";
        case ErrorKind::Degenerate: return "degenerate configuration";
        case ErrorKind::Conditioning: return "ill-conditioned system";
        case ErrorKind::Precision: return "precision";
        case ErrorKind::Configuration: return "configuration";
    }
    return "unknown";
}

bool is_configuration_error(ErrorKind kind) {
    return kind == ErrorKind::InvalidInput || kind == ErrorKind::UnsupportedRegime ||
           kind == ErrorKind::Configuration || kind == ErrorKind::GridMismatch;
}

Error::Error(ErrorKind kind, const std::string& message, double value)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      value_(value) {}

}  // namespace fkdv
