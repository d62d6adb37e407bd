#pragma once

#include <optional>

#include "fkdv/spectral.hpp"

namespace fkdv {

/// Solitary-wave profile Q_c solving |D|^a Q + c Q - Q^2 = 0 on a periodic grid.
struct GroundState {
    double alpha;
    double speed;
    SpectralField profile;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Lowest supported dispersion exponent (exclusive).
inline constexpr double kMinAlpha = 0.5;
inline constexpr double kMaxAlpha = 2.0;

/// Petviashvili iteration seeded with a sech^2 bump of height 3c/2.
/// Stops once the L2 residual of the profile equation is <= tol.
GroundState solve_ground_state(double alpha, double c, const Grid& grid, double tol = 1e-10,
                               int max_iter = 2000);

/// Same iteration started from a caller-provided profile.
GroundState solve_ground_state_from(double alpha, double c, const SpectralField& seed, double tol = 1e-10,
                                    int max_iter = 2000);

/// c_new * Q(lambda x) with lambda = (c_new/c)^(1/alpha), resampled spectrally on the
/// same grid and then polished to the profile-equation tolerance.
GroundState rescale(const GroundState& q, double c_new, double tol = 1e-10);

/// ||(|D|^a + c) Q - Q^2||_{L2}.
double profile_residual(const SpectralField& q, double alpha, double c);

/// Largest upper-quarter Fourier magnitude relative to the peak.
double spectral_tail(const SpectralField& q);

/// Explicit profiles: (3c/2) sech^2(sqrt(c) x / 2) at alpha = 2, 2c/(1 + c^2 x^2) at alpha = 1.
std::optional<SpectralField> closed_form_profile(double alpha, double c, const Grid& grid);

struct DecayFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;
    /// Largest |x| at which periodic images stay below a tenth of the profile,
    /// assuming the fitted power law.
    double contamination_limit = 0.0;
};

/// Least-squares slope of log Q against log(1 + x) over [x_lo, x_hi], using the
/// even average of the two half lines and only positive samples.
DecayFit fit_decay_exponent(const GroundState& q, double x_lo, double x_hi);

double mass_of(const SpectralField& u);
double energy_of(const SpectralField& u, double alpha);
double mass_of(const GroundState& q);
double energy_of(const GroundState& q);

/// Scale-invariant Gagliardo-Nirenberg quotient
/// (int (|D|^{a/2}u)^2)^{1/(2a)} (int u^2)^{(3a-1)/(2a)} / int |u|^3.
double gagliardo_nirenberg(const SpectralField& u, double alpha);

}  // namespace fkdv
