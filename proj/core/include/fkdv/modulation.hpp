#pragma once

#include <cstddef>
#include <vector>

#include "fkdv/ground_state.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

/// Speeds c_1 < ... < c_N with their ground states on a shared grid.
class SolitonEnsemble {
public:
    SolitonEnsemble(double alpha, std::vector<double> speeds, const Grid& grid, double tol = 1e-10);

    double alpha() const noexcept { return alpha_; }
    const std::vector<double>& speeds() const noexcept { return speeds_; }
    std::size_t size() const noexcept { return speeds_.size(); }
    const Grid& grid() const noexcept { return grid_; }
    const GroundState& profile(std::size_t j) const { return profiles_.at(j); }
    /// 0.5 * min(c_1, c_2 - c_1, ..., c_N - c_{N-1}).
    double beta() const noexcept { return beta_; }

    /// d^order/dx^order of Q_{c_j}(x - rho).
    SpectralField shifted(std::size_t j, double rho, int order = 0) const;

private:
    double alpha_;
    std::vector<double> speeds_;
    Grid grid_;
    std::vector<GroundState> profiles_;
    std::vector<std::vector<Complex>> coeffs_;
    double beta_;
};

struct ModulationState {
    std::vector<double> rho;
    SpectralField eta;
    std::vector<double> ortho_residuals;
    double time = 0.0;
    int iterations = 0;
};

/// R = sum_j Q_{c_j}(x - rho_j). Positions must be increasing, inside the box and
/// at least 10 grid spacings apart.
SpectralField assemble_R(const SolitonEnsemble& ens, const std::vector<double>& positions);

/// Newton solve of int (u - R_Y) d_x R_{Y,j} = 0 for all j.
ModulationState modulate(const SpectralField& u, const SolitonEnsemble& ens, const std::vector<double>& rho_guess,
                         double tol = 1e-12, int max_iter = 50);

/// Positions of the n_peaks largest well-separated local maxima, ascending.
std::vector<double> find_peaks(const SpectralField& u, std::size_t n_peaks, double min_separation);

/// Solves A rho' = B at one instant. The state may be given in a frame moving at
/// frame_speed; the returned velocities are lab-frame.
std::vector<double> velocity_from_system(const SolitonEnsemble& ens, const ModulationState& state);

/// Five-point centred difference of rho at the middle entry of a uniformly spaced
/// window (size >= 5, odd); falls back to lower order near the ends of a series.
std::vector<double> velocity_from_differences(const std::vector<ModulationState>& history, std::size_t index);

struct VelocityEstimate {
    std::vector<double> finite_difference;
    std::vector<double> ode_system;
    double max_discrepancy = 0.0;
};

/// Both estimators at the middle state of history (>= 5 states, uniform spacing).
VelocityEstimate velocity_estimate(const SolitonEnsemble& ens, const std::vector<ModulationState>& history,
                                   double frame_speed = 0.0);

struct OverlapMatrices {
    std::vector<std::vector<double>> grad_grad;  // int d_x R_j d_x R_k
    std::vector<std::vector<double>> value_hess;  // int R_j d_x^2 R_k
};

OverlapMatrices overlap_integrals(const SolitonEnsemble& ens, const std::vector<double>& positions);

struct OverlapSweep {
    std::vector<double> gaps;
    std::vector<double> grad_grad;  // |int d_x R_1 d_x R_2|
    std::vector<bool> contaminated;
    double exponent = 0.0;
    bool any_contaminated = false;
};

/// Two-soliton separation sweep of the off-diagonal entry with a log-log fit over
/// uncontaminated gaps (periodic image closer than three gaps counts as contaminated).
OverlapSweep overlap_decay_sweep(const SolitonEnsemble& ens, const std::vector<double>& gaps);

}  // namespace fkdv
