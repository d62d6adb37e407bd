#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fkdv {

/// Failure categories. The CLI maps these onto its exit-code contract:
/// input/configuration problems exit 2, numerical failures exit 3.
enum class ErrorKind {
    InvalidInput,       // non-finite samples, malformed arguments
    GridMismatch,       // operands live on different grids
    UnsupportedRegime,  // alpha outside the supported dispersion range
    Divergence,         // an iteration failed to converge
    Resolution,         // the grid cannot resolve the requested object
    Contamination,      // periodic images dominate the measured quantity
    Instability,        // solution blew up during time stepping
    NumericalFailure,   // NaN, failed factorization, solver error
    Degenerate,         // singular modulation Jacobian (overlapping waves)
    Conditioning,       // ill-conditioned modulation ODE matrix
    Precision,          // quadrature could not reach requested accuracy
    Configuration,      // schema violation in a config file
};

std::string_view to_string(ErrorKind kind);

/// True for kinds the CLI reports as configuration errors.
bool is_configuration_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, double value = 0.0);

    ErrorKind kind() const noexcept { return kind_; }

    /// Kind-specific payload, e.g. the last residual of a diverged solve.
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

}  // namespace fkdv
