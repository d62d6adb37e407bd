#include "fkdv/inequality_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "fkdv/errors.hpp"
#include "fkdv/fitting.hpp"

namespace fkdv {

namespace {

constexpr std::array<std::pair<EstimateId, std::string_view>, 16> kNames{{
    {EstimateId::sc1G, "sc1G"},       {EstimateId::sc2G, "sc2G"},   {EstimateId::nsc1G, "nsc1G"},
    {EstimateId::nsc2G, "nsc2G"},     {EstimateId::eqnorm1, "eqnorm1"}, {EstimateId::esttc, "esttc"},
    {EstimateId::nlt3, "nlt3"},       {EstimateId::nlt4, "nlt4"},   {EstimateId::esttcnl, "esttcnl"},
    {EstimateId::est1, "est1"},       {EstimateId::est2, "est2"},   {EstimateId::est3, "est3"},
    {EstimateId::est4, "est4"},       {EstimateId::est5, "est5"},   {EstimateId::est6, "est6"},
    {EstimateId::est7, "est7"},
}};

double sum_product(std::span<const double> a, std::span<const double> b, double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * dx;
}

/// Spectral refinement onto a grid with twice the points (zero padding).
SpectralField refine(const SpectralField& f) {
    const Grid& g = f.grid();
    const Grid fine(2 * g.size(), g.box_length());
    const auto c = f.coefficients();
    std::vector<Complex> padded(fine.spectrum_size());
    const std::size_t half = g.size() / 2;
    for (std::size_t m = 0; m < half; ++m) padded[m] = 2.0 * c[m];
    padded[half] = c[half];  // split Nyquist between +/- half
    return SpectralField::from_coefficients(fine, padded);
}

struct Weights {
    SpectralField phi, w, sqrt_w;
};

Weights weights(double alpha, double A, double centre, const Grid& g) {
    Weights out{scaled_phi(alpha, A, centre, g), scaled_dphi_abs(alpha, A, centre, g), SpectralField::zeros(g)};
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(out.w[i]);
    out.sqrt_w = SpectralField(g, std::move(s));
    return out;
}

void evaluate(EstimateCase& c) {
    const Grid& g = c.u.grid();
    const double dx = g.dx();
    const double a = c.alpha;
    const auto wt = weights(a, c.A, c.centre, g);
    const SpectralField& u = c.u;
    const SpectralField du = riesz_apply(u, a);
    const SpectralField dhu = riesz_apply(u, 0.5 * a);
    const SpectralField usw = u * wt.sqrt_w;
    const SpectralField dh_usw = riesz_apply(usw, 0.5 * a);
    const double u2w = inner(u * u, wt.w);
    const double dhu2w = inner(dhu * dhu, wt.w);
    const double du2w = inner(du * du, wt.w);
    const double high = a > 1.0 ? dhu2w : 0.0;
    c.rhs_components.clear();

    switch (c.id) {
        case EstimateId::sc1G: {
            c.lhs = std::abs(sum_product(du.samples(), (u * wt.w).samples(), dx) - inner(dh_usw, dh_usw));
            c.rhs_components = {u2w};
            break;
        }
        case EstimateId::sc2G: {
            const SpectralField ux = deriv_x(u);
            c.lhs = std::abs(inner(du * ux, wt.phi) + 0.5 * (a - 1.0) * inner(dh_usw, dh_usw));
            c.rhs_components = {u2w};
            break;
        }
        case EstimateId::nsc1G:
        case EstimateId::nsc2G: {
            const SpectralField v = c.v ? *c.v : du;
            require_same_grid(u, v);
            const SpectralField dv = riesz_apply(v, a);
            const double v2w = inner(v * v, wt.w);
            if (c.id == EstimateId::nsc1G) {
                c.lhs = std::abs(inner(du * v - dv * u, wt.w));
            } else {
                const SpectralField dh_vsw = riesz_apply(v * wt.sqrt_w, 0.5 * a);
                c.lhs = std::abs(inner(du * deriv_x(v) + dv * deriv_x(u), wt.phi) + (a - 1.0) * inner(dh_usw, dh_vsw));
            }
            c.rhs_components = {u2w, v2w, high};
            break;
        }
        case EstimateId::eqnorm1: {
            const SpectralField d_usw = riesz_apply(usw, a);
            c.lhs = std::abs(inner(d_usw, d_usw) - du2w);
            c.rhs_components = {u2w, high, du2w};
            break;
        }
        case EstimateId::esttc: {
            const SpectralField d_usw = riesz_apply(usw, a);
            const double x = std::abs(inner(d_usw, du * wt.sqrt_w));
            c.lhs = std::max(0.0, x - du2w);
            c.rhs_components = {u2w, dhu2w, du2w};
            break;
        }
        default:
            throw Error(ErrorKind::InvalidInput, "estimate " + std::string(to_string(c.id)) + " is not a commutator estimate");
    }
    c.rhs = 0.0;
    for (double r : c.rhs_components) c.rhs += r;
    c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : 0.0;
}

}  // namespace

std::string_view to_string(EstimateId id) {
    for (const auto& [k, name] : kNames) {
        if (k == id) return name;
    }
    return "unknown";
}

std::optional<EstimateId> parse_estimate(std::string_view name) {
    for (const auto& [k, n] : kNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

std::vector<EstimateId> all_estimates() {
    std::vector<EstimateId> out;
    for (const auto& [k, n] : kNames) out.push_back(k);
    return out;
}

bool is_commutator_estimate(EstimateId id) {
    switch (id) {
        case EstimateId::sc1G:
        case EstimateId::sc2G:
        case EstimateId::nsc1G:
        case EstimateId::nsc2G:
        case EstimateId::eqnorm1:
        case EstimateId::esttc: return true;
        default: return false;
    }
}

bool is_overlap_estimate(EstimateId id) {
    switch (id) {
        case EstimateId::est1:
        case EstimateId::est2:
        case EstimateId::est3:
        case EstimateId::est4:
        case EstimateId::est5:
        case EstimateId::est6:
        case EstimateId::est7: return true;
        default: return false;
    }
}

double claimed_a_exponent(EstimateId id, double alpha) {
    switch (id) {
        case EstimateId::sc1G:
        case EstimateId::sc2G: return -alpha;
        case EstimateId::nsc1G:
        case EstimateId::nsc2G:
        case EstimateId::eqnorm1: return alpha <= 1.0 ? -alpha : -0.5 * alpha;
        case EstimateId::esttc:
        case EstimateId::esttcnl: return -0.5 * alpha;
        default: throw Error(ErrorKind::InvalidInput, "no A exponent for " + std::string(to_string(id)));
    }
}

double claimed_overlap_exponent(EstimateId id, double alpha, double p, double q) {
    switch (id) {
        case EstimateId::est1: return -(1.0 + alpha) * std::min(p, q);
        case EstimateId::est2: return -(2.0 + alpha) * std::min(p, q);
        case EstimateId::est3: return -std::min(p * (1.0 + alpha), q * alpha);
        case EstimateId::est4: return -(1.0 + alpha) * std::min(p, q);
        case EstimateId::est5: return -std::min(q * alpha, p * (1.0 + alpha));
        case EstimateId::est6: return -std::min(q * alpha, p * (2.0 + alpha));
        case EstimateId::est7: return -std::min(q * (1.0 + alpha), p * (2.0 + alpha));
        default: throw Error(ErrorKind::InvalidInput, "no overlap exponent for " + std::string(to_string(id)));
    }
}

EstimateCase measure(EstimateCase c) {
    if (!c.u.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite test field");
    if (!(c.A > 1.0)) throw Error(ErrorKind::InvalidInput, "weight scale A must exceed 1", c.A);
    evaluate(c);
    c.counterexample_candidate = false;
    if (c.rhs == 0.0 && c.lhs != 0.0) {
        EstimateCase fine = c;
        fine.u = refine(c.u);
        if (c.v) fine.v = refine(*c.v);
        evaluate(fine);
        c.counterexample_candidate = fine.rhs == 0.0 && fine.lhs != 0.0;
    }
    return c;
}

std::vector<SpectralField> estimate_ensemble(const Grid& g, double A, double centre, const EnsembleSpec& spec) {
    std::vector<SpectralField> members;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal;
    const double kc = std::min(spec.k_cut, (2.0 / 3.0) * g.max_wavenumber());
    const std::array<double, 3> offsets{0.0, -3.0 * A, 3.0 * A};
    for (std::size_t b = 0; b < spec.size; ++b) {
        std::vector<Complex> coef(g.spectrum_size());
        for (std::size_t m = 1; m < coef.size(); ++m) {
            if (std::abs(g.wavenumber(m)) <= kc) coef[m] = Complex{normal(rng), normal(rng)};
        }
        const SpectralField carrier = SpectralField::from_coefficients(g, coef);
        const double x0 = centre + offsets[b % offsets.size()];
        const double width = spec.width;
        const SpectralField env = SpectralField::from_function(g, [=](double x) {
            const double s = (x - x0) / width;
            return std::exp(-0.5 * s * s);
        });
        SpectralField f = carrier * env;
        const double norm = l2_norm(f);
        if (norm > 0.0) f *= 1.0 / norm;
        members.push_back(std::move(f));
    }
    if (spec.dilated_probes) {
        auto add = [&](auto&& fn) { members.push_back(SpectralField::from_function(g, fn)); };
        add([=](double x) { const double s = (x - centre) / A; return std::exp(-s * s); });
        add([=](double x) { const double s = (x - centre) / A; return s * std::exp(-s * s); });
        add([=](double x) { const double s = (x - centre) / A; const double h = 1.0 / std::cosh(0.5 * s); return h * h; });
        add([=](double x) { const double s = (x - centre) / A; return std::exp(-0.5 * s * s) * std::cos(2.0 * s); });
        add([=](double x) { const double s = (x - centre) / A - 1.0; return std::exp(-s * s); });
    }
    return members;
}

ScalingReport sweep_and_fit(EstimateId id, double alpha, const std::vector<double>& a_values, const Grid& grid,
                            const EnsembleSpec& spec, double tolerance) {
    if (!is_commutator_estimate(id)) {
        throw Error(ErrorKind::InvalidInput, std::string(to_string(id)) + " is not swept over A");
    }
    if (a_values.size() < 4) throw Error(ErrorKind::InvalidInput, "A sweep needs at least four values");
    const auto [amin, amax] = std::minmax_element(a_values.begin(), a_values.end());
    if (*amax < 8.0 * *amin) throw Error(ErrorKind::InvalidInput, "A sweep should span about a decade");

    ScalingReport report;
    report.id = id;
    report.alpha = alpha;
    report.claimed_exponent = claimed_a_exponent(id, alpha);
    EnsembleSpec current = spec;
    std::vector<std::vector<double>> per_member;
    for (int attempt = 0;; ++attempt) {
        report.points.clear();
        per_member.clear();
        bool degenerate = false;
        for (double A : a_values) {
            const auto members = estimate_ensemble(grid, A, 0.0, current);
            SweepPoint pt;
            pt.A = A;
            std::size_t live = 0;
            const bool paired = id == EstimateId::nsc1G || id == EstimateId::nsc2G;
            for (std::size_t m = 0; m < members.size(); ++m) {
                double ratio = 0.0;
                for (int variant = 0; variant < (paired ? 2 : 1); ++variant) {
                    EstimateCase c;
                    c.id = id;
                    c.alpha = alpha;
                    c.A = A;
                    c.u = members[m];
                    if (variant == 1) c.v = members[(m + 1) % members.size()];
                    c = measure(std::move(c));
                    if (c.rhs > 0.0) ++live;
                    if (c.counterexample_candidate) ++pt.counterexamples;
                    ratio = std::max(ratio, c.ratio);
                }
                if (per_member.size() <= m) per_member.resize(m + 1);
                per_member[m].push_back(ratio);
                pt.mean_ratio += ratio;
                if (ratio > pt.max_ratio) {
                    pt.max_ratio = ratio;
                    pt.argmax = m;
                }
            }
            pt.members = members.size();
            pt.mean_ratio /= static_cast<double>(std::max<std::size_t>(1, members.size()));
            if (live == 0) degenerate = true;
            report.points.push_back(pt);
        }
        if (!degenerate) break;
        if (attempt >= 3) throw Error(ErrorKind::Degenerate, "estimate ensemble annihilated by the weight");
        ++current.seed;
        ++report.regenerations;
    }
    report.seed = current.seed;

    std::vector<double> xs, ys;
    for (const auto& pt : report.points) {
        xs.push_back(pt.A);
        ys.push_back(pt.max_ratio);
        report.worst_constant = std::max(report.worst_constant, pt.max_ratio * std::pow(pt.A, -report.claimed_exponent));
    }
    report.bounded = std::all_of(report.points.begin(), report.points.end(), [](const SweepPoint& p) {
        return std::isfinite(p.max_ratio) && p.counterexamples == 0;
    });
    report.fitted_exponent = fit_loglog(xs, ys).slope;
    // Slowest decaying member family near the maximum sets the rate of the supremum.
    constexpr double kSignificant = 0.05;
    report.slowest_exponent = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < per_member.size(); ++m) {
        const auto& r = per_member[m];
        if (r.size() != xs.size()) continue;
        bool significant = true;
        for (std::size_t a = 0; a < r.size(); ++a) significant = significant && r[a] >= kSignificant * ys[a];
        if (!significant) continue;
        const double slope = fit_loglog(xs, r).slope;
        if (slope > report.slowest_exponent) {
            report.slowest_exponent = slope;
            report.slowest_member = m;
        }
    }
    if (!std::isfinite(report.slowest_exponent)) report.slowest_exponent = report.fitted_exponent;
    report.within_tolerance = std::abs(report.fitted_exponent - report.claimed_exponent) <= tolerance;
    return report;
}

double overlap_value(EstimateId id, const SolitonEnsemble& ens, const std::vector<double>& rho, double p, double q,
                     double A) {
    if (ens.size() != 2) throw Error(ErrorKind::InvalidInput, "overlap estimates use a two-soliton ensemble");
    const Grid& g = ens.grid();
    const SpectralField r1 = ens.shifted(0, rho[0]);
    const SpectralField r2 = ens.shifted(1, rho[1]);
    const double m = 0.5 * (rho[0] + rho[1]);
    auto integral = [&](auto&& density) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += density(i);
        return s * g.dx();
    };
    auto pw = [](double x, double e) { return e == 0.0 ? 1.0 : std::pow(std::abs(x), e); };
    switch (id) {
        case EstimateId::est1:
            return integral([&](std::size_t i) { return pw(r1[i], p) * pw(r2[i], q); });
        case EstimateId::est2: {
            const SpectralField d1 = deriv_x(r1), d2 = deriv_x(r2);
            return integral([&](std::size_t i) { return pw(d1[i], p) * pw(d2[i], q); });
        }
        case EstimateId::est3: {
            // R_2 against psi_1 = phi_1.
            const SpectralField psi = scaled_phi(ens.alpha(), A, m, g);
            return integral([&](std::size_t i) { return pw(r2[i], p) * pw(psi[i], q); });
        }
        case EstimateId::est4: {
            const SpectralField w = scaled_dphi_abs(ens.alpha(), A, m, g);
            return integral([&](std::size_t i) { return pw(r1[i], p) * pw(w[i], q); });
        }
        case EstimateId::est5: {
            const SpectralField psi = scaled_phi(ens.alpha(), A, m, g);
            return integral([&](std::size_t i) { return pw(r1[i], p) * (1.0 - pw(psi[i], q)); });
        }
        case EstimateId::est6: {
            const SpectralField psi = scaled_phi(ens.alpha(), A, m, g);
            const SpectralField d1 = deriv_x(r1);
            return integral([&](std::size_t i) { return pw(d1[i], p) * (1.0 - pw(psi[i], q)); });
        }
        case EstimateId::est7: {
            const SpectralField w = scaled_dphi_abs(ens.alpha(), A, m, g);
            const SpectralField d1 = deriv_x(r1);
            return integral([&](std::size_t i) { return pw(d1[i], p) * pw(w[i], q); });
        }
        default:
            throw Error(ErrorKind::InvalidInput, std::string(to_string(id)) + " is not an overlap estimate");
    }
}

OverlapReport overlap_sweep(EstimateId id, const SolitonEnsemble& ens, const std::vector<double>& separations,
                            double p, double q, double A, double tolerance) {
    OverlapReport r;
    r.id = id;
    r.alpha = ens.alpha();
    r.p = p;
    r.q = q;
    r.A = A;
    r.claimed_exponent = claimed_overlap_exponent(id, ens.alpha(), p, q);
    for (double d : separations) {
        r.separations.push_back(d);
        r.values.push_back(std::abs(overlap_value(id, ens, {-0.5 * d, 0.5 * d}, p, q, A)));
    }
    r.fitted_exponent = fit_loglog(r.separations, r.values).slope;
    r.within_tolerance = std::abs(r.fitted_exponent - r.claimed_exponent) <= tolerance;
    return r;
}

std::vector<NonlinearRow> nonlinear_bounds_audit(const SpectralField& u, const ModulationState& state,
                                                 const LocalizationKit& kit) {
    const double a = kit.alpha();
    const SpectralField& eta = state.eta;
    require_same_grid(u, eta);
    const double gamma = sobolev_norm(eta, 0.5 * a);
    const SpectralField du = riesz_apply(u, a);
    const SpectralField dhu = riesz_apply(u, 0.5 * a);
    std::vector<NonlinearRow> rows;
    for (std::size_t j = 0; j + 1 < kit.size(); ++j) {
        const SpectralField& w = kit.dphi_abs(j);
        std::vector<double> s(w.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(w[i]);
        const SpectralField sw(w.grid(), std::move(s));
        const SpectralField dh_usw = riesz_apply(u * sw, 0.5 * a);
        const SpectralField dh_u2sw = riesz_apply(u * u * sw, 0.5 * a);

        NonlinearRow row;
        row.j = j + 1;
        row.gamma = gamma;
        const double u2w = inner(u * u, w);
        row.bracket = u2w + inner(dh_usw, dh_usw);
        double cubic = 0.0, quartic = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double e = std::abs(eta[i]);
            cubic += e * e * e * w[i];
            quartic += e * e * e * e * w[i];
        }
        row.cubic = cubic * w.grid().dx();
        row.quartic = quartic * w.grid().dx();
        if (gamma > 0.0 && row.bracket > 0.0) {
            row.nlt3_constant = row.cubic / (gamma * row.bracket);
            row.nlt4_constant = row.quartic / (gamma * gamma * row.bracket);
        }
        row.tc_lhs = std::abs(inner(dh_usw, dh_u2sw));
        row.tc_excess = std::max(0.0, row.tc_lhs - 0.125 * inner(du * du, w));
        const double base = (gamma * gamma + std::pow(kit.A(), -0.5 * a)) * (u2w + inner(dhu * dhu, w));
        row.tc_constant = base > 0.0 ? row.tc_excess / base : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fkdv
