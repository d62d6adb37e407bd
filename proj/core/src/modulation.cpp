#include "fkdv/modulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "fkdv/errors.hpp"
#include "fkdv/fitting.hpp"

namespace fkdv {

namespace {
constexpr double kTailLimit = 1e-6;
}  // namespace

SolitonEnsemble::SolitonEnsemble(double alpha, std::vector<double> speeds, const Grid& grid, double tol)
    : alpha_(alpha), speeds_(std::move(speeds)), grid_(grid), beta_(0.0) {
    if (speeds_.empty()) throw Error(ErrorKind::InvalidInput, "ensemble needs at least one speed");
    double gap = speeds_.front();
    for (std::size_t j = 0; j < speeds_.size(); ++j) {
        if (!(speeds_[j] > 0.0)) throw Error(ErrorKind::InvalidInput, "speeds must be positive", speeds_[j]);
        if (j > 0) {
            if (!(speeds_[j] > speeds_[j - 1])) {
                throw Error(ErrorKind::InvalidInput, "speeds must satisfy 0 < c_1 < ... < c_N");
            }
            gap = std::min(gap, speeds_[j] - speeds_[j - 1]);
        }
    }
    beta_ = 0.5 * gap;
    for (double c : speeds_) {
        profiles_.push_back(solve_ground_state(alpha, c, grid, tol));
        const double tail = spectral_tail(profiles_.back().profile);
        if (tail > kTailLimit) {
            throw Error(ErrorKind::Resolution,
                        "soliton with speed " + std::to_string(c) + " is not resolved on this grid", tail);
        }
        coeffs_.push_back(profiles_.back().profile.coefficients());
    }
}

SpectralField SolitonEnsemble::shifted(std::size_t j, double rho, int order) const {
    const auto& base = coeffs_.at(j);
    const std::size_t half = grid_.size() / 2;
    std::vector<Complex> c(base.size());
    for (std::size_t m = 0; m < c.size(); ++m) {
        const double k = grid_.wavenumber(m);
        if (m == half) {
            c[m] = order % 2 == 1 ? Complex{} : Complex{base[m].real() * std::cos(k * rho) * std::pow(-k * k, order / 2), 0.0};
            continue;
        }
        Complex f = std::polar(1.0, -k * rho);
        for (int p = 0; p < order; ++p) f *= Complex{0.0, k};
        c[m] = base[m] * f;
    }
    return SpectralField::from_coefficients(grid_, c);
}

namespace {

void check_positions(const SolitonEnsemble& ens, const std::vector<double>& positions) {
    const Grid& g = ens.grid();
    if (positions.size() != ens.size()) {
        throw Error(ErrorKind::InvalidInput, "expected " + std::to_string(ens.size()) + " positions");
    }
    const double half = 0.5 * g.box_length();
    for (std::size_t j = 0; j < positions.size(); ++j) {
        if (!std::isfinite(positions[j]) || positions[j] < -half || positions[j] >= half) {
            throw Error(ErrorKind::InvalidInput, "position outside the box", positions[j]);
        }
        if (j > 0 && positions[j] - positions[j - 1] < 10.0 * g.dx()) {
            throw Error(ErrorKind::InvalidInput, "positions must increase with gaps of at least 10 dx");
        }
    }
}

struct Pieces {
    std::vector<SpectralField> r, dr, ddr;
};

Pieces pieces(const SolitonEnsemble& ens, const std::vector<double>& rho, bool second) {
    Pieces p;
    for (std::size_t j = 0; j < ens.size(); ++j) {
        p.r.push_back(ens.shifted(j, rho[j], 0));
        p.dr.push_back(ens.shifted(j, rho[j], 1));
        if (second) p.ddr.push_back(ens.shifted(j, rho[j], 2));
    }
    return p;
}

SpectralField sum(const std::vector<SpectralField>& fs) {
    SpectralField out = fs.front();
    for (std::size_t j = 1; j < fs.size(); ++j) out += fs[j];
    return out;
}

}  // namespace

SpectralField assemble_R(const SolitonEnsemble& ens, const std::vector<double>& positions) {
    check_positions(ens, positions);
    SpectralField out = SpectralField::zeros(ens.grid());
    for (std::size_t j = 0; j < ens.size(); ++j) out += ens.shifted(j, positions[j]);
    return out;
}

ModulationState modulate(const SpectralField& u, const SolitonEnsemble& ens, const std::vector<double>& rho_guess,
                         double tol, int max_iter) {
    if (!(u.grid() == ens.grid())) throw Error(ErrorKind::GridMismatch, "state and ensemble grids differ");
    if (!u.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite state");
    check_positions(ens, rho_guess);
    const std::size_t n = ens.size();
    std::vector<double> rho = rho_guess;

    for (int it = 0; it <= max_iter; ++it) {
        const auto p = pieces(ens, rho, true);
        SpectralField eta = u - sum(p.r);
        const double eta_norm = l2_norm(eta);

        Eigen::VectorXd phi(n);
        Eigen::MatrixXd jac(n, n);
        bool converged = true;
        std::vector<double> residuals(n);
        for (std::size_t j = 0; j < n; ++j) {
            phi(j) = inner(eta, p.dr[j]);
            residuals[j] = phi(j);
            if (std::abs(phi(j)) > tol * l2_norm(p.dr[j]) * eta_norm) converged = false;
            for (std::size_t k = 0; k < n; ++k) {
                jac(j, k) = inner(p.dr[k], p.dr[j]);
                if (j == k) jac(j, k) -= inner(eta, p.ddr[j]);
            }
        }
        if (converged) return ModulationState{rho, std::move(eta), residuals, 0.0, it};
        if (it == max_iter) break;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (lu.rcond() < 1e-10) {
            throw Error(ErrorKind::Degenerate, "modulation Jacobian is singular (overlapping solitons)", lu.rcond());
        }
        const Eigen::VectorXd delta = -lu.solve(phi);
        double step = 0.0, scale = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            rho[j] += delta(j);
            step = std::max(step, std::abs(delta(j)));
            scale = std::max(scale, std::abs(rho[j]));
        }
        if (!std::isfinite(step)) throw Error(ErrorKind::Divergence, "modulation Newton step is not finite");
        if (step <= 1e-14 * scale) {
            // Orthogonality is at round-off: report the final residuals.
            const auto q = pieces(ens, rho, false);
            SpectralField eta_final = u - sum(q.r);
            std::vector<double> res(n);
            for (std::size_t j = 0; j < n; ++j) res[j] = inner(eta_final, q.dr[j]);
            return ModulationState{rho, std::move(eta_final), res, 0.0, it + 1};
        }
    }
    throw Error(ErrorKind::Divergence, "modulation Newton iteration did not converge in " +
                                           std::to_string(max_iter) + " iterations");
}

std::vector<double> find_peaks(const SpectralField& u, std::size_t n_peaks, double min_separation) {
    const Grid& g = u.grid();
    const std::size_t n = g.size();
    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u[i];
        if (v > u[(i + n - 1) % n] && v >= u[(i + 1) % n]) maxima.push_back(i);
    }
    std::sort(maxima.begin(), maxima.end(), [&u](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    std::vector<double> chosen;
    for (std::size_t i : maxima) {
        if (chosen.size() == n_peaks) break;
        // Parabolic refinement through the three neighbouring samples.
        const double ym = u[(i + n - 1) % n], y0 = u[i], yp = u[(i + 1) % n];
        const double denom = ym - 2.0 * y0 + yp;
        const double offset = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
        const double x = g.x(i) + offset * g.dx();
        bool far = true;
        for (double c : chosen) far = far && std::abs(c - x) >= min_separation;
        if (far) chosen.push_back(x);
    }
    if (chosen.size() < n_peaks) {
        throw Error(ErrorKind::Degenerate, "found only " + std::to_string(chosen.size()) + " separated peaks");
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<double> velocity_from_system(const SolitonEnsemble& ens, const ModulationState& state) {
    const std::size_t n = ens.size();
    const auto p = pieces(ens, state.rho, true);
    const SpectralField& eta = state.eta;
    const SpectralField r = sum(p.r);
    const double alpha = ens.alpha();

    // F = |D|^a eta - 2 R eta - eta^2 - sum c_k R_k - 2 sum_{l<m} R_l R_m
    SpectralField f = riesz_apply(eta, alpha) - 2.0 * (r * eta) - eta * eta;
    for (std::size_t k = 0; k < n; ++k) {
        f -= ens.speeds()[k] * p.r[k];
        for (std::size_t m = k + 1; m < n; ++m) f -= 2.0 * (p.r[k] * p.r[m]);
    }

    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    double min_diag = INFINITY, max_eta_term = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        b(j) = inner(f, p.ddr[j]);
        for (std::size_t k = 0; k < n; ++k) a(j, k) = inner(p.dr[k], p.dr[j]);
        min_diag = std::min(min_diag, a(j, j));
        const double eta_term = inner(eta, p.ddr[j]);
        max_eta_term = std::max(max_eta_term, std::abs(eta_term));
        a(j, j) -= eta_term;
    }
    if (max_eta_term >= 0.5 * min_diag) {
        throw Error(ErrorKind::Conditioning, "modulation ODE matrix dominated by the residual term",
                    max_eta_term / min_diag);
    }
    const Eigen::VectorXd v = a.partialPivLu().solve(b);
    return std::vector<double>(v.data(), v.data() + n);
}

std::vector<double> velocity_from_differences(const std::vector<ModulationState>& history, std::size_t index) {
    const std::size_t m = history.size();
    if (m < 2 || index >= m) throw Error(ErrorKind::InvalidInput, "velocity stencil needs at least two states");
    const std::size_t n = history[index].rho.size();
    std::vector<double> out(n);
    auto rho = [&](std::size_t i, std::size_t j) { return history[i].rho[j]; };
    const double h = m > 1 ? (history.back().time - history.front().time) / static_cast<double>(m - 1) : 0.0;
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidInput, "velocity stencil needs increasing times");
    for (std::size_t i = 1; i < m; ++i) {
        const double hi = history[i].time - history[i - 1].time;
        if (std::abs(hi - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw Error(ErrorKind::InvalidInput, "velocity stencil needs uniformly spaced states");
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (index >= 2 && index + 2 < m) {
            out[j] = (-rho(index + 2, j) + 8.0 * rho(index + 1, j) - 8.0 * rho(index - 1, j) + rho(index - 2, j)) /
                     (12.0 * h);
        } else if (index >= 1 && index + 1 < m) {
            out[j] = (rho(index + 1, j) - rho(index - 1, j)) / (2.0 * h);
        } else if (index == 0) {
            out[j] = (rho(1, j) - rho(0, j)) / h;
        } else {
            out[j] = (rho(index, j) - rho(index - 1, j)) / h;
        }
    }
    return out;
}

VelocityEstimate velocity_estimate(const SolitonEnsemble& ens, const std::vector<ModulationState>& history,
                                   double frame_speed) {
    if (history.size() < 5) throw Error(ErrorKind::InvalidInput, "velocity estimate needs at least 5 states");
    const std::size_t mid = history.size() / 2;
    VelocityEstimate est;
    est.finite_difference = velocity_from_differences(history, mid);
    for (double& v : est.finite_difference) v += frame_speed;
    est.ode_system = velocity_from_system(ens, history[mid]);
    for (std::size_t j = 0; j < est.ode_system.size(); ++j) {
        est.max_discrepancy = std::max(est.max_discrepancy, std::abs(est.ode_system[j] - est.finite_difference[j]));
    }
    return est;
}

OverlapMatrices overlap_integrals(const SolitonEnsemble& ens, const std::vector<double>& positions) {
    check_positions(ens, positions);
    const auto p = pieces(ens, positions, true);
    const std::size_t n = ens.size();
    OverlapMatrices out{std::vector<std::vector<double>>(n, std::vector<double>(n)),
                        std::vector<std::vector<double>>(n, std::vector<double>(n))};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            out.grad_grad[j][k] = inner(p.dr[j], p.dr[k]);
            out.value_hess[j][k] = inner(p.r[j], p.ddr[k]);
        }
    }
    return out;
}

OverlapSweep overlap_decay_sweep(const SolitonEnsemble& ens, const std::vector<double>& gaps) {
    if (ens.size() != 2) throw Error(ErrorKind::InvalidInput, "overlap sweep needs a two-soliton ensemble");
    const double box = ens.grid().box_length();
    OverlapSweep sweep;
    std::vector<double> xs, ys;
    for (double gap : gaps) {
        const double half_gap = 0.5 * gap;
        if (!(gap > 0.0) || half_gap >= 0.5 * box) {
            throw Error(ErrorKind::InvalidInput, "gap must be positive and fit in the box", gap);
        }
        const auto m = overlap_integrals(ens, {-half_gap, half_gap});
        const double v = std::abs(m.grad_grad[0][1]);
        const bool contaminated = box - gap < 3.0 * gap;
        sweep.gaps.push_back(gap);
        sweep.grad_grad.push_back(v);
        sweep.contaminated.push_back(contaminated);
        sweep.any_contaminated = sweep.any_contaminated || contaminated;
        if (!contaminated) {
            xs.push_back(gap);
            ys.push_back(v);
        }
    }
    if (xs.size() >= 2) sweep.exponent = fit_loglog(xs, ys).slope;
    return sweep;
}

}  // namespace fkdv
