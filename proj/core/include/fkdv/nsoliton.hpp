#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/evolution.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

/// Backward construction of an N-soliton: seed R at t = s_n, run down to t0.
struct ExperimentPlan {
    double alpha = 2.0;
    std::vector<double> speeds{1.0, 2.0};
    double s_n = 300.0;
    double t0 = 50.0;
    /// rho_j^in - c_j s_n; empty means all zero. Each must lie within s_n^{1 - alpha/4}.
    std::vector<double> offsets;
    double box_length = 800.0;
    std::size_t n_points = 8192;
    double dt = 2e-3;
    /// Physical time between modulation frames.
    double record_interval = 1.0;
    double A = 20.0;
    bool dealias = true;
    /// Tube: ||eta||_{H^{a/2}} below this fraction of min_j ||Q_j||_{H^{a/2}}.
    double tube_radius = 0.25;
    /// Decay fits use frames with t <= fit_fraction * s_n.
    double fit_fraction = 0.5;
    /// Fill localized functionals and H_j on every frame.
    bool localized_diagnostics = true;

    void validate() const;
    Grid grid() const;
    double frame_speed() const;
    double offset_limit() const;
    /// Initial positions in box coordinates (lab minus frame_speed * s_n).
    std::vector<double> seed_positions() const;
};

struct ConstructionVerdicts {
    /// max_t ||eta||_{H^{a/2}} t^{a/2}
    double c0_eta = 0.0;
    /// max_{j,t} |rho_j - c_j t - offset_j| t^{a/4 - 1}
    double bootstrap = 0.0;
    /// max_{j,t} |rho_j' - c_j| t^{a/2}
    double c0_velocity = 0.0;
    /// Slopes in log t over the fit window.
    double eta_slope = 0.0;
    double velocity_slope = 0.0;
    double fit_t_max = 0.0;
    std::size_t fit_samples = 0;
    double mass_drift = 0.0;     // relative
    double energy_drift = 0.0;   // relative
    bool eta_slope_ok = false;
    bool velocity_slope_ok = false;
};

struct ConstructionResult {
    ExperimentPlan plan;
    /// Frames in run order (t decreasing from s_n). t and rho are physical.
    std::vector<DiagnosticsRecord> records;
    /// u(t0) in box coordinates.
    SpectralField final_state;
    std::optional<ErrorKind> failure;
    std::string failure_message;
    std::optional<double> failure_time;
    ConstructionVerdicts verdicts;

    bool ok() const noexcept { return !failure.has_value(); }
};

ConstructionResult run_construction(const ExperimentPlan& plan);

/// Verdicts from frames alone (used by run_construction).
ConstructionVerdicts construction_verdicts(const ExperimentPlan& plan, const std::vector<DiagnosticsRecord>& records);

/// f(t) = max_j ((rho_j - c_j t) t^{a/4 - 1})^2 at one frame.
double bootstrap_functional(const ExperimentPlan& plan, const DiagnosticsRecord& record);

struct OffsetOutcome {
    std::vector<double> offsets;
    /// First frame time with f > 1, if any.
    std::optional<double> exit_time;
    /// df/dt at the exit, by one-sided difference towards larger t.
    double f_derivative = 0.0;
    bool transversal = false;
    std::optional<ErrorKind> failure;
};

/// One construction per offset vector; reports exits from the bootstrap window.
std::vector<OffsetOutcome> offset_sensitivity(const ExperimentPlan& plan,
                                              const std::vector<std::vector<double>>& offset_grid);

/// Exit analysis of a finished run.
OffsetOutcome bootstrap_exit(const ExperimentPlan& plan, const std::vector<DiagnosticsRecord>& records);

}  // namespace fkdv
