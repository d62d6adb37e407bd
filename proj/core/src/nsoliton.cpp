#include "fkdv/nsoliton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fkdv/fitting.hpp"
#include "fkdv/ground_state.hpp"
#include "fkdv/localization.hpp"
#include "fkdv/modulation.hpp"

namespace fkdv {

void ExperimentPlan::validate() const {
    if (!(alpha > kMinAlpha && alpha <= kMaxAlpha)) {
        throw Error(ErrorKind::UnsupportedRegime, "alpha must lie in (0.5, 2]", alpha);
    }
    if (speeds.empty()) throw Error(ErrorKind::InvalidInput, "at least one speed is required");
    for (std::size_t j = 0; j < speeds.size(); ++j) {
        if (!(speeds[j] > 0.0)) throw Error(ErrorKind::InvalidInput, "speeds must be positive", speeds[j]);
        if (j > 0 && !(speeds[j] > speeds[j - 1])) {
            throw Error(ErrorKind::InvalidInput, "speeds must satisfy 0 < c_1 < ... < c_N");
        }
    }
    if (!(t0 > 0.0) || !(s_n > t0)) throw Error(ErrorKind::InvalidInput, "need 0 < t0 < s_n");
    if (!offsets.empty() && offsets.size() != speeds.size()) {
        throw Error(ErrorKind::InvalidInput, "one offset per soliton is required");
    }
    const double lim = offset_limit();
    for (double d : offsets) {
        if (!std::isfinite(d) || std::abs(d) > lim * (1.0 + 1e-12)) {
            throw Error(ErrorKind::InvalidInput, "offset outside the initial interval of half-width " + std::to_string(lim), d);
        }
    }
    if (!(dt > 0.0) || !(record_interval >= dt)) throw Error(ErrorKind::InvalidInput, "need 0 < dt <= record_interval");
    if (!(A > 1.0)) throw Error(ErrorKind::InvalidInput, "weight scale A must exceed 1", A);
    if (!(tube_radius > 0.0)) throw Error(ErrorKind::InvalidInput, "tube radius must be positive", tube_radius);
    if (!(fit_fraction > 0.0 && fit_fraction <= 1.0)) {
        throw Error(ErrorKind::InvalidInput, "fit_fraction must lie in (0, 1]", fit_fraction);
    }
    const auto y = seed_positions();
    const double reach = 0.375 * box_length;
    for (double p : y) {
        if (std::abs(p) > reach) {
            throw Error(ErrorKind::InvalidInput, "box too small: seed position " + std::to_string(p) +
                                                     " is within box/8 of the seam", p);
        }
    }
}

Grid ExperimentPlan::grid() const { return Grid(n_points, box_length); }

double ExperimentPlan::frame_speed() const {
    return std::accumulate(speeds.begin(), speeds.end(), 0.0) / static_cast<double>(speeds.size());
}

double ExperimentPlan::offset_limit() const { return std::pow(s_n, 1.0 - 0.25 * alpha); }

std::vector<double> ExperimentPlan::seed_positions() const {
    const double cbar = frame_speed();
    std::vector<double> y(speeds.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        y[j] = (speeds[j] - cbar) * s_n + (offsets.empty() ? 0.0 : offsets[j]);
    }
    return y;
}

double bootstrap_functional(const ExperimentPlan& plan, const DiagnosticsRecord& record) {
    const double t = record.t;
    double f = 0.0;
    for (std::size_t j = 0; j < record.rho.size(); ++j) {
        const double v = (record.rho[j] - plan.speeds[j] * t) * std::pow(t, 0.25 * plan.alpha - 1.0);
        f = std::max(f, v * v);
    }
    return f;
}

ConstructionVerdicts construction_verdicts(const ExperimentPlan& plan, const std::vector<DiagnosticsRecord>& records) {
    ConstructionVerdicts v;
    const double a = plan.alpha;
    v.fit_t_max = plan.fit_fraction * plan.s_n;
    std::vector<double> ts, etas, tv, devs;
    for (const auto& r : records) {
        if (!(r.t > 0.0) || r.rho.size() != plan.speeds.size()) continue;
        v.c0_eta = std::max(v.c0_eta, r.eta_h * std::pow(r.t, 0.5 * a));
        double dev = 0.0;
        for (std::size_t j = 0; j < r.rho.size(); ++j) {
            const double off = plan.offsets.empty() ? 0.0 : plan.offsets[j];
            v.bootstrap = std::max(v.bootstrap, std::abs(r.rho[j] - plan.speeds[j] * r.t - off) *
                                                    std::pow(r.t, 0.25 * a - 1.0));
            if (j < r.rho_dot.size()) dev = std::max(dev, std::abs(r.rho_dot[j] - plan.speeds[j]));
        }
        v.c0_velocity = std::max(v.c0_velocity, dev * std::pow(r.t, 0.5 * a));
        if (r.t <= v.fit_t_max * (1.0 + 1e-12)) {
            if (r.eta_h > 0.0) {
                ts.push_back(r.t);
                etas.push_back(r.eta_h);
            }
            if (dev > 0.0) {
                tv.push_back(r.t);
                devs.push_back(dev);
            }
        }
    }
    v.fit_samples = ts.size();
    const double bound = -0.5 * a + 0.3;
    if (ts.size() >= 3) {
        v.eta_slope = fit_loglog(ts, etas).slope;
        v.eta_slope_ok = v.eta_slope <= bound;
    }
    if (tv.size() >= 3) {
        v.velocity_slope = fit_loglog(tv, devs).slope;
        v.velocity_slope_ok = v.velocity_slope <= bound;
    }
    if (!records.empty()) {
        const auto& f = records.front();
        const auto& l = records.back();
        if (f.mass != 0.0) v.mass_drift = std::abs(l.mass - f.mass) / std::abs(f.mass);
        if (f.energy != 0.0) v.energy_drift = std::abs(l.energy - f.energy) / std::abs(f.energy);
    }
    return v;
}

ConstructionResult run_construction(const ExperimentPlan& plan) {
    plan.validate();
    const Grid g = plan.grid();
    const SolitonEnsemble ens(plan.alpha, plan.speeds, g);
    const double cbar = plan.frame_speed();
    const double s = plan.s_n;

    double q_min = INFINITY;
    for (std::size_t j = 0; j < ens.size(); ++j) {
        q_min = std::min(q_min, sobolev_norm(ens.profile(j).profile, 0.5 * plan.alpha));
    }
    const double tube = plan.tube_radius * q_min;

    const auto y0 = plan.seed_positions();
    const SpectralField u_seed = assemble_R(ens, y0);

    EvolutionConfig cfg;
    cfg.alpha = plan.alpha;
    cfg.dt = plan.dt;
    cfg.t_start = 0.0;
    cfg.t_end = s - plan.t0;
    cfg.dealias = plan.dealias;
    cfg.record_every = std::max(1, static_cast<int>(std::lround(plan.record_interval / plan.dt)));
    cfg.frame_speed = cbar;

    ConstructionResult result{plan, {}, u_seed, std::nullopt, {}, std::nullopt, {}};
    std::vector<double> guess = y0;
    std::vector<double> guess_speed = plan.speeds;
    double t_last = s;
    const double min_gap = 10.0 * g.dx();

    Observer track = [&](const SpectralField& v, double tau, DiagnosticsRecord& rec) {
        const double t = s - tau;
        const SpectralField u = reflect_time(v);
        rec.t = t;
        try {
            // Predict positions from the last velocities.
            for (std::size_t j = 0; j < guess.size(); ++j) guess[j] += (guess_speed[j] - cbar) * (t - t_last);
            const ModulationState st = modulate(u, ens, guess);
            guess = st.rho;
            t_last = t;
            rec.eta_l2 = l2_norm(st.eta);
            rec.eta_h = sobolev_norm(st.eta, 0.5 * plan.alpha);
            rec.ortho_residuals = st.ortho_residuals;
            rec.rho_dot = velocity_from_system(ens, st);
            guess_speed = rec.rho_dot;
            rec.rho.resize(st.rho.size());
            for (std::size_t j = 0; j < st.rho.size(); ++j) rec.rho[j] = st.rho[j] + cbar * t;
            bool separated = true;
            for (std::size_t j = 1; j < st.rho.size(); ++j) separated = separated && st.rho[j] - st.rho[j - 1] > min_gap;
            rec.tube_ok = separated && rec.eta_h <= tube;
            if (!rec.tube_ok) {
                throw Error(ErrorKind::Instability, "left the modulation tube at t = " + std::to_string(t), t);
            }
            if (plan.localized_diagnostics && ens.size() > 1) {
                const LocalizationKit kit(ens, st.rho, plan.A);
                const auto lv = localized_functionals(u, kit);
                rec.local_mass = lv.mass;
                rec.local_energy = lv.energy;
                rec.e_tilde = lv.e_tilde;
                rec.h_j = quadratic_forms(st.eta, ens, st.rho, kit);
            }
        } catch (const Error&) {
            result.failure_time = t;
            throw;
        }
    };

    Trajectory traj = evolve(reflect_time(u_seed), cfg, {track});
    result.records = std::move(traj.records);
    result.final_state = reflect_time(traj.final_state);
    result.failure = traj.failure;
    result.failure_message = traj.failure_message;
    if (result.failure && !result.failure_time) {
        result.failure_time = result.records.empty() ? s : result.records.back().t;
    }
    result.verdicts = construction_verdicts(plan, result.records);
    return result;
}

OffsetOutcome bootstrap_exit(const ExperimentPlan& plan, const std::vector<DiagnosticsRecord>& records) {
    OffsetOutcome out;
    out.offsets = plan.offsets;
    double f_prev = 0.0, t_prev = 0.0;
    bool have_prev = false;
    for (const auto& r : records) {
        if (r.rho.size() != plan.speeds.size() || !(r.t > 0.0)) continue;
        const double f = bootstrap_functional(plan, r);
        if (f > 1.0 && have_prev) {
            out.exit_time = r.t;
            out.f_derivative = (f - f_prev) / (r.t - t_prev);
            out.transversal = out.f_derivative < 0.0;
            return out;
        }
        f_prev = f;
        t_prev = r.t;
        have_prev = true;
    }
    return out;
}

std::vector<OffsetOutcome> offset_sensitivity(const ExperimentPlan& plan,
                                              const std::vector<std::vector<double>>& offset_grid) {
    std::vector<OffsetOutcome> out;
    for (const auto& offs : offset_grid) {
        ExperimentPlan p = plan;
        p.offsets = offs;
        p.localized_diagnostics = false;
        const ConstructionResult r = run_construction(p);
        OffsetOutcome o = bootstrap_exit(p, r.records);
        o.failure = r.failure;
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace fkdv
