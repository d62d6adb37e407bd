#include "fkdv/localization.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fkdv/errors.hpp"
#include "fkdv/ground_state.hpp"

namespace fkdv {

namespace {

double bracket_power(double y, double alpha) { return std::pow(1.0 + y * y, -0.5 * (1.0 + alpha)); }

double compute_normalization(double alpha) {
    struct Params {
        double alpha;
    } params{alpha};
    gsl_function fn;
    fn.function = [](double y, void* p) { return bracket_power(y, static_cast<Params*>(p)->alpha); };
    fn.params = &params;

    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(2000), &gsl_integration_workspace_free);
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    double half = 0.0, err = 0.0;
    const int status = gsl_integration_qagiu(&fn, 0.0, 0.0, 1e-13, 2000, ws.get(), &half, &err);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS && !(status == GSL_EROUND && err < 1e-11 * half)) {
        throw Error(ErrorKind::Precision,
                    std::string("normalising integral did not converge: ") + gsl_strerror(status), err);
    }
    return 1.0 / (2.0 * half);
}

}  // namespace

double phi_normalization(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "weight exponent must be positive", alpha);
    static std::mutex mutex;
    static std::map<double, double> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
    const double value = compute_normalization(alpha);
    cache.emplace(alpha, value);
    return value;
}

double phi_value(double x, double alpha) {
    // int_{-inf}^x <y>^{-(1+a)} dy in closed form through the regularised
    // incomplete beta function, evaluated on the tail side for accuracy.
    const double tail = 0.5 * boost::math::ibeta(0.5 * alpha, 0.5, 1.0 / (1.0 + x * x));
    return x >= 0.0 ? tail : 1.0 - tail;
}

double phi_derivative(double x, double alpha) { return -phi_normalization(alpha) * bracket_power(x, alpha); }

PhiSamples build_phi(double alpha, const Grid& grid) {
    const double c = phi_normalization(alpha);
    return {SpectralField::from_function(grid, [alpha](double x) { return phi_value(x, alpha); }), c};
}

SpectralField scaled_phi(double alpha, double A, double centre, const Grid& grid) {
    return SpectralField::from_function(grid, [=](double x) { return phi_value((x - centre) / A, alpha); });
}

SpectralField scaled_dphi_abs(double alpha, double A, double centre, const Grid& grid) {
    const double c = phi_normalization(alpha);
    return SpectralField::from_function(grid,
                                        [=](double x) { return c / A * bracket_power((x - centre) / A, alpha); });
}

double sigma0(const std::vector<double>& speeds) {
    if (speeds.empty()) throw Error(ErrorKind::InvalidInput, "sigma0 needs at least one speed");
    double s = speeds.back() / 4.0;
    for (std::size_t j = 0; j + 1 < speeds.size(); ++j) {
        const double a = speeds[j], b = speeds[j + 1];
        s = std::min({s, a / 4.0, a * b / (4.0 * (a + b))});
    }
    if (speeds.size() == 1) s = std::min(s, speeds.front() / 4.0);
    return s;
}

bool ResummationCoefficients::all_positive() const {
    auto pos = [](double v) { return v > 0.0; };
    return std::all_of(energy_partial.begin(), energy_partial.end(), pos) &&
           std::all_of(mass_partial.begin(), mass_partial.end(), pos) && energy_total > 0.0 && mass_total > 0.0;
}

ResummationCoefficients resummation_coefficients(const std::vector<double>& speeds) {
    const double s = sigma0(speeds);
    ResummationCoefficients r;
    for (std::size_t j = 0; j + 1 < speeds.size(); ++j) {
        const double a = 1.0 / speeds[j], b = 1.0 / speeds[j + 1];
        r.energy_partial.push_back(a * a - b * b);
        r.mass_partial.push_back(0.5 * (a - b) * (1.0 - 2.0 * s * (a + b)));
    }
    const double cn = speeds.back();
    r.energy_total = 1.0 / (cn * cn);
    r.mass_total = (1.0 - 2.0 * s / cn) / (2.0 * cn);
    return r;
}

LocalizationKit::LocalizationKit(double alpha, std::vector<double> speeds, const std::vector<double>& rho, double A,
                                 const Grid& grid)
    : alpha_(alpha), speeds_(std::move(speeds)), a_(A), grid_(grid), c_phi_(phi_normalization(alpha)),
      sigma0_(0.0) {
    if (!(A > 1.0)) throw Error(ErrorKind::InvalidInput, "weight scale A must exceed 1", A);
    if (rho.size() != speeds_.size()) throw Error(ErrorKind::InvalidInput, "one position per speed required");
    sigma0_ = fkdv::sigma0(speeds_);
    const double guard = 0.375 * grid.box_length();
    for (std::size_t j = 0; j < rho.size(); ++j) {
        if (std::abs(rho[j]) > guard) {
            throw Error(ErrorKind::InvalidInput, "soliton within box/8 of the periodic seam", rho[j]);
        }
        if (j > 0 && !(rho[j] > rho[j - 1])) throw Error(ErrorKind::InvalidInput, "positions must increase");
    }
    const std::size_t n = speeds_.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double m = 0.5 * (rho[j] + rho[j + 1]);
        midpoints_.push_back(m);
        phi_.push_back(scaled_phi(alpha, A, m, grid));
        dphi_abs_.push_back(scaled_dphi_abs(alpha, A, m, grid));
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (n == 1) {
            psi_.push_back(SpectralField::constant(grid, 1.0));
        } else if (j == 0) {
            psi_.push_back(phi_[0]);
        } else if (j + 1 == n) {
            psi_.push_back(SpectralField::constant(grid, 1.0) - phi_[j - 1]);
        } else {
            psi_.push_back(phi_[j] - phi_[j - 1]);
        }
    }
}

LocalizationKit::LocalizationKit(const SolitonEnsemble& ens, const std::vector<double>& rho, double A)
    : LocalizationKit(ens.alpha(), ens.speeds(), rho, A, ens.grid()) {}

namespace {

void check_kit(const SpectralField& u, const LocalizationKit& kit, std::size_t j) {
    if (!(u.grid() == kit.grid())) throw Error(ErrorKind::GridMismatch, "field and weight kit grids differ");
    if (j >= kit.size()) throw Error(ErrorKind::InvalidInput, "soliton index out of range");
}

double weighted_sum(std::span<const double> a, std::span<const double> w, double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
    return s * dx;
}

}  // namespace

double localized_mass(const SpectralField& u, const LocalizationKit& kit, std::size_t j) {
    check_kit(u, kit, j);
    return inner(u * u, kit.psi(j));
}

double localized_energy(const SpectralField& u, const LocalizationKit& kit, std::size_t j) {
    check_kit(u, kit, j);
    const SpectralField du = riesz_apply(u, kit.alpha());
    std::vector<double> density(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) density[i] = 0.5 * u[i] * du[i] - u[i] * u[i] * u[i] / 3.0;
    return weighted_sum(density, kit.psi(j).samples(), u.grid().dx());
}

double e_tilde(const SpectralField& u, const LocalizationKit& kit, std::size_t j) {
    return localized_energy(u, kit, j) + kit.sigma0() * localized_mass(u, kit, j);
}

LocalizedValues localized_functionals(const SpectralField& u, const LocalizationKit& kit) {
    check_kit(u, kit, 0);
    const SpectralField du = riesz_apply(u, kit.alpha());
    std::vector<double> mass_density(u.size()), energy_density(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        mass_density[i] = u[i] * u[i];
        energy_density[i] = 0.5 * u[i] * du[i] - u[i] * u[i] * u[i] / 3.0;
    }
    LocalizedValues out;
    const double dx = u.grid().dx();
    for (std::size_t j = 0; j < kit.size(); ++j) {
        out.mass.push_back(weighted_sum(mass_density, kit.psi(j).samples(), dx));
        out.energy.push_back(weighted_sum(energy_density, kit.psi(j).samples(), dx));
        out.e_tilde.push_back(out.energy.back() + kit.sigma0() * out.mass.back());
    }
    return out;
}

std::vector<double> quadratic_forms(const SpectralField& eta, const SolitonEnsemble& ens,
                                    const std::vector<double>& rho, const LocalizationKit& kit) {
    check_kit(eta, kit, 0);
    const SpectralField d_eta = riesz_apply(eta, ens.alpha());
    std::vector<double> out;
    for (std::size_t j = 0; j < ens.size(); ++j) {
        const SpectralField rj = ens.shifted(j, rho[j]);
        const double cj = ens.speeds()[j];
        std::vector<double> density(eta.size());
        for (std::size_t i = 0; i < eta.size(); ++i) {
            density[i] = eta[i] * d_eta[i] + (cj - 2.0 * rj[i]) * eta[i] * eta[i];
        }
        out.push_back(weighted_sum(density, kit.psi(j).samples(), eta.grid().dx()));
    }
    return out;
}

MonotonicityReport monotonicity_audit(const std::vector<DiagnosticsRecord>& records, double alpha, double beta) {
    MonotonicityReport report;
    if (records.empty()) return report;
    const DiagnosticsRecord* last = nullptr;
    for (const auto& r : records) {
        if (r.tube_ok && !r.local_mass.empty() && (!last || r.t > last->t)) last = &r;
    }
    if (!last) {
        report.excluded_frames = records.size();
        return report;
    }
    report.final_time = last->t;
    const std::size_t n = last->local_mass.size();
    report.min_mass_scaled.assign(n, INFINITY);
    report.min_energy_scaled.assign(n, INFINITY);

    for (const auto& r : records) {
        if (!r.tube_ok || r.local_mass.size() != n || r.e_tilde.size() != n || !(r.t > 0.0)) {
            ++report.excluded_frames;
            continue;
        }
        if (r.t >= last->t) continue;
        const double scale = std::pow(beta * r.t, alpha);
        double dm = 0.0, de = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dm += last->local_mass[j] - r.local_mass[j];
            de += last->e_tilde[j] - r.e_tilde[j];
            MonotonicityRow row{r.t, j + 1, dm, dm * scale, de, de * scale};
            report.min_mass_scaled[j] = std::min(report.min_mass_scaled[j], row.mass_scaled);
            report.min_energy_scaled[j] = std::min(report.min_energy_scaled[j], row.energy_scaled);
            report.rows.push_back(row);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(report.min_mass_scaled[j])) {
            report.fitted_constant_mass = std::max(report.fitted_constant_mass, -report.min_mass_scaled[j]);
        }
        if (std::isfinite(report.min_energy_scaled[j])) {
            report.fitted_constant_energy = std::max(report.fitted_constant_energy, -report.min_energy_scaled[j]);
        }
    }
    return report;
}

std::vector<ExpansionRow> expansion_audit(const SpectralField& u, const ModulationState& state,
                                          const SolitonEnsemble& ens, const LocalizationKit& kit) {
    check_kit(u, kit, 0);
    const auto values = localized_functionals(u, kit);
    const auto h = quadratic_forms(state.eta, ens, state.rho, kit);
    const double scale = state.time > 0.0 ? std::pow(ens.beta() * state.time, ens.alpha()) : 1.0;
    std::vector<ExpansionRow> rows;
    for (std::size_t j = 0; j < ens.size(); ++j) {
        const GroundState& q = ens.profile(j);
        const double cj = ens.speeds()[j];
        const SpectralField rj = ens.shifted(j, state.rho[j]);
        ExpansionRow row{};
        row.mass = values.mass[j];
        row.mass_expansion = mass_of(q) + 2.0 * inner(state.eta, rj) + inner(state.eta * state.eta, kit.psi(j));
        row.mass_gap = std::abs(row.mass - row.mass_expansion);
        row.energy_lhs = values.energy[j] + 0.5 * cj * values.mass[j] - (energy_of(q) + 0.5 * cj * mass_of(q));
        row.h_j = h[j];
        row.energy_gap = std::abs(row.energy_lhs - 0.5 * row.h_j);
        row.mass_gap_scaled = row.mass_gap * scale;
        row.energy_gap_scaled = row.energy_gap * scale;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fkdv
