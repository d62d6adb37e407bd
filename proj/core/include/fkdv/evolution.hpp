#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

struct EvolutionConfig {
    double alpha = 2.0;
    double dt = 1e-2;
    double t_start = 0.0;
    double t_end = 1.0;
    bool dealias = true;
    int record_every = 10;
    /// Nonlinear CFL number: substeps never exceed cfl * dx / max|u|.
    double cfl = 0.5;
    bool adaptive = true;
    /// Speed of the co-moving frame y = x - frame_speed * t.
    double frame_speed = 0.0;
    double blowup = 1e6;

    void validate() const;
};

/// Scalars sampled at a record step. Evolution fills t, mass, energy, steps and
/// dt; observers (modulation tracking, localization) fill the rest.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    std::size_t steps = 0;
    double dt = 0.0;
    std::vector<double> local_mass;
    std::vector<double> local_energy;
    std::vector<double> e_tilde;
    std::vector<double> h_j;
    double eta_l2 = 0.0;
    double eta_h = 0.0;
    std::vector<double> rho;
    std::vector<double> rho_dot;
    std::vector<double> ortho_residuals;
    bool tube_ok = true;
};

/// Called at t_start and after every record interval. May throw fkdv::Error to
/// stop the run (for example when the state leaves the modulation tube).
using Observer = std::function<void(const SpectralField& u, double t, DiagnosticsRecord& record)>;

struct Trajectory {
    SpectralField final_state;
    double final_time = 0.0;
    std::size_t steps = 0;
    std::vector<DiagnosticsRecord> records;
    /// Set when the run aborted early; records hold everything up to the failure.
    std::optional<ErrorKind> failure;
    std::string failure_message;

    bool ok() const noexcept { return !failure.has_value(); }
};

/// Integrating-factor RK4 for u_t = |D|^a u_x - (u^2)_x (plus frame_speed * u_x),
/// reusing transforms and propagators across steps.
class Stepper {
public:
    Stepper(const Grid& grid, const EvolutionConfig& cfg);

    /// Advances the half spectrum in place by h.
    void advance(std::vector<Complex>& uhat, double h);
    /// max|u| of a half spectrum.
    double max_abs(const std::vector<Complex>& uhat);

    const Grid& grid() const noexcept { return grid_; }

private:
    void nonlinear(const std::vector<Complex>& vhat, std::vector<Complex>& out, double h);
    void set_step(double h);

    Grid grid_;
    EvolutionConfig cfg_;
    std::vector<double> omega_;  // linear frequency k(|k|^a + frame_speed)
    std::vector<double> ik_;     // k, zeroed at Nyquist and outside the dealias band
    double cached_h_ = -1.0;
    std::vector<Complex> e_half_, e_full_;
    std::vector<Complex> a_, b_, c_, d_, tmp_;
    std::vector<double> phys_;
};

/// One step of size cfg.dt.
SpectralField step(const SpectralField& u, const EvolutionConfig& cfg);

/// Evolves from cfg.t_start to cfg.t_end. Records are spaced record_every*dt apart;
/// within each interval the substep is shrunk if the nonlinear CFL requires it.
Trajectory evolve(const SpectralField& u0, const EvolutionConfig& cfg,
                  const std::vector<Observer>& observers = {});

/// x -> u(-x): with t -> -t this maps solutions to solutions.
SpectralField reflect_time(const SpectralField& u);

}  // namespace fkdv
