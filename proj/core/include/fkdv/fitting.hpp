#pragma once

#include <cstddef>
#include <span>

namespace fkdv {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
};

/// Ordinary least squares y = slope*x + intercept. Needs >= 2 distinct x.
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Least-squares slope of log|y| against log x. Non-positive x or zero y are skipped.
LinearFit fit_loglog(std::span<const double> xs, std::span<const double> ys);

}  // namespace fkdv
