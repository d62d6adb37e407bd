#include "fkdv/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "fkdv/ground_state.hpp"

namespace fkdv {

void EvolutionConfig::validate() const {
    if (!(alpha > 0.0) || alpha > kMaxAlpha) throw Error(ErrorKind::UnsupportedRegime, "alpha must lie in (0, 2]", alpha);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidInput, "dt must be positive", dt);
    if (!(t_end > t_start)) throw Error(ErrorKind::InvalidInput, "t_end must exceed t_start");
    if (record_every < 1) throw Error(ErrorKind::InvalidInput, "record_every must be >= 1");
    if (!(cfl > 0.0)) throw Error(ErrorKind::InvalidInput, "cfl must be positive", cfl);
    if (!(blowup > 0.0)) throw Error(ErrorKind::InvalidInput, "blowup threshold must be positive");
}

Stepper::Stepper(const Grid& grid, const EvolutionConfig& cfg) : grid_(grid), cfg_(cfg) {
    const std::size_t ns = grid.spectrum_size();
    const std::size_t half = grid.size() / 2;
    const double cutoff = (2.0 / 3.0) * grid.max_wavenumber();
    omega_.resize(ns);
    ik_.resize(ns);
    for (std::size_t m = 0; m < ns; ++m) {
        const double k = grid.wavenumber(m);
        omega_[m] = m == half ? 0.0 : k * (std::pow(std::abs(k), cfg.alpha) + cfg.frame_speed);
        const bool keep = m != half && (!cfg.dealias || std::abs(k) <= cutoff);
        ik_[m] = keep ? k : 0.0;
    }
    e_half_.resize(ns);
    e_full_.resize(ns);
    a_.resize(ns);
    b_.resize(ns);
    c_.resize(ns);
    d_.resize(ns);
    tmp_.resize(ns);
    phys_.resize(grid.size());
}

void Stepper::set_step(double h) {
    if (h == cached_h_) return;
    for (std::size_t m = 0; m < omega_.size(); ++m) {
        e_half_[m] = std::polar(1.0, 0.5 * h * omega_[m]);
        e_full_[m] = e_half_[m] * e_half_[m];
    }
    cached_h_ = h;
}

void Stepper::nonlinear(const std::vector<Complex>& vhat, std::vector<Complex>& out, double h) {
    auto& ctx = thread_context(grid_);
    ctx.backward(vhat, phys_);
    for (double& v : phys_) v *= v;
    ctx.forward(phys_, out);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] *= Complex{0.0, -h * ik_[m]};
}

void Stepper::advance(std::vector<Complex>& u, double h) {
    set_step(h);
    const std::size_t ns = u.size();
    nonlinear(u, a_, h);
    for (std::size_t m = 0; m < ns; ++m) tmp_[m] = e_half_[m] * (u[m] + 0.5 * a_[m]);
    nonlinear(tmp_, b_, h);
    for (std::size_t m = 0; m < ns; ++m) tmp_[m] = e_half_[m] * u[m] + 0.5 * b_[m];
    nonlinear(tmp_, c_, h);
    for (std::size_t m = 0; m < ns; ++m) tmp_[m] = e_full_[m] * u[m] + e_half_[m] * c_[m];
    nonlinear(tmp_, d_, h);
    for (std::size_t m = 0; m < ns; ++m) {
        u[m] = e_full_[m] * u[m] +
               (e_full_[m] * a_[m] + 2.0 * e_half_[m] * (b_[m] + c_[m]) + d_[m]) / 6.0;
    }
}

double Stepper::max_abs(const std::vector<Complex>& uhat) {
    thread_context(grid_).backward(uhat, phys_);
    double m = 0.0;
    for (double v : phys_) {
        if (!std::isfinite(v)) return v;
        m = std::max(m, std::abs(v));
    }
    return m;
}

SpectralField step(const SpectralField& u, const EvolutionConfig& cfg) {
    cfg.validate();
    if (!u.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite initial state");
    Stepper stepper(u.grid(), cfg);
    auto uhat = u.coefficients();
    stepper.advance(uhat, cfg.dt);
    auto out = SpectralField::from_coefficients(u.grid(), uhat);
    if (!out.all_finite()) throw Error(ErrorKind::NumericalFailure, "step produced non-finite values");
    if (out.max_abs() > cfg.blowup) throw Error(ErrorKind::Instability, "max|u| exceeded blow-up threshold", out.max_abs());
    return out;
}

namespace {

void fill_record(DiagnosticsRecord& rec, const SpectralField& u, double t, double alpha, std::size_t steps,
                 double h) {
    rec.t = t;
    rec.mass = mass_of(u);
    rec.energy = energy_of(u, alpha);
    rec.steps = steps;
    rec.dt = h;
}

}  // namespace

Trajectory evolve(const SpectralField& u0, const EvolutionConfig& cfg, const std::vector<Observer>& observers) {
    cfg.validate();
    if (!u0.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite initial state");
    const Grid& g = u0.grid();
    Stepper stepper(g, cfg);
    auto uhat = u0.coefficients();

    Trajectory traj{u0, cfg.t_start, 0, {}, std::nullopt, {}};
    const double interval = cfg.dt * cfg.record_every;
    const auto n_intervals = static_cast<long>(std::ceil((cfg.t_end - cfg.t_start) / interval - 1e-9));
    double h_last = cfg.dt;

    auto record = [&](const SpectralField& u, double t) {
        DiagnosticsRecord rec;
        fill_record(rec, u, t, cfg.alpha, traj.steps, h_last);
        for (const auto& obs : observers) obs(u, t, rec);
        traj.records.push_back(std::move(rec));
    };

    try {
        record(u0, cfg.t_start);
        for (long j = 0; j < n_intervals; ++j) {
            const double t0 = cfg.t_start + static_cast<double>(j) * interval;
            const double t1 = std::min(cfg.t_start + static_cast<double>(j + 1) * interval, cfg.t_end);
            const double span = t1 - t0;
            long substeps = std::max<long>(1, std::lround(std::ceil(span / cfg.dt - 1e-9)));
            if (cfg.adaptive) {
                const double umax = stepper.max_abs(uhat);
                if (!std::isfinite(umax)) throw Error(ErrorKind::NumericalFailure, "non-finite state");
                if (umax > 0.0) {
                    const double dt_cfl = cfg.cfl * g.dx() / umax;
                    substeps = std::max<long>(substeps, std::lround(std::ceil(span / dt_cfl)));
                }
            }
            const double h = span / static_cast<double>(substeps);
            for (long s = 0; s < substeps; ++s) {
                stepper.advance(uhat, h);
                ++traj.steps;
            }
            h_last = h;
            const double umax = stepper.max_abs(uhat);
            if (!std::isfinite(umax)) {
                throw Error(ErrorKind::NumericalFailure, "non-finite values at t = " + std::to_string(t1), t1);
            }
            if (umax > cfg.blowup) {
                throw Error(ErrorKind::Instability, "max|u| exceeded blow-up threshold at t = " + std::to_string(t1), t1);
            }
            traj.final_state = SpectralField::from_coefficients(g, uhat);
            traj.final_time = t1;
            record(traj.final_state, t1);
        }
    } catch (const Error& e) {
        traj.failure = e.kind();
        traj.failure_message = e.what();
        if (!traj.records.empty()) traj.final_time = traj.records.back().t;
    }
    return traj;
}

SpectralField reflect_time(const SpectralField& u) {
    const std::size_t n = u.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = u[(n - i) % n];
    return SpectralField(u.grid(), std::move(out));
}

}  // namespace fkdv
