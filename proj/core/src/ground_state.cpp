#include "fkdv/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fkdv/errors.hpp"
#include "fkdv/fitting.hpp"

namespace fkdv {

namespace {

void check_regime(double alpha, double c) {
    if (!(alpha > kMinAlpha) || alpha > kMaxAlpha) {
        throw Error(ErrorKind::UnsupportedRegime,
                    "alpha = " + std::to_string(alpha) + " outside the supported range (0.5, 2]", alpha);
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorKind::InvalidInput, "speed must be positive and finite", c);
    }
}

std::vector<double> symbol(const Grid& g, double alpha, double c) {
    std::vector<double> s(g.spectrum_size());
    for (std::size_t m = 0; m < s.size(); ++m) s[m] = std::pow(std::abs(g.wavenumber(m)), alpha) + c;
    s[0] = c;
    return s;
}

double half_spectrum_energy(const std::vector<Complex>& v, const Grid& g) {
    const std::size_t half = g.size() / 2;
    double sum = 0.0;
    for (std::size_t m = 0; m <= half; ++m) {
        sum += ((m == 0 || m == half) ? 1.0 : 2.0) * std::norm(v[m]);
    }
    return sum * g.dx() / static_cast<double>(g.size());
}

}  // namespace

double profile_residual(const SpectralField& q, double alpha, double c) {
    const Grid& g = q.grid();
    const auto sym = symbol(g, alpha, c);
    auto qh = q.coefficients();
    const auto q2h = (q * q).coefficients();
    for (std::size_t m = 0; m < qh.size(); ++m) qh[m] = sym[m] * qh[m] - q2h[m];
    return std::sqrt(half_spectrum_energy(qh, g));
}

GroundState solve_ground_state_from(double alpha, double c, const SpectralField& seed, double tol,
                                    int max_iter) {
    check_regime(alpha, c);
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerance must be positive", tol);
    if (!seed.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite seed profile");

    const Grid& g = seed.grid();
    auto& ctx = thread_context(g);
    const auto sym = symbol(g, alpha, c);
    const std::size_t ns = g.spectrum_size();

    std::vector<double> q(seed.samples().begin(), seed.samples().end());
    std::vector<double> q2(g.size());
    std::vector<Complex> qh(ns), q2h(ns), r(ns);

    double residual = 0.0;
    for (int it = 0; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < q.size(); ++i) q2[i] = q[i] * q[i];
        ctx.forward(q, qh);
        ctx.forward(q2, q2h);

        double num = 0.0, den = 0.0;
        const std::size_t half = g.size() / 2;
        for (std::size_t m = 0; m < ns; ++m) {
            const double w = (m == 0 || m == half) ? 1.0 : 2.0;
            num += w * sym[m] * std::norm(qh[m]);
            den += w * (std::conj(qh[m]) * q2h[m]).real();
            r[m] = sym[m] * qh[m] - q2h[m];
        }
        residual = std::sqrt(half_spectrum_energy(r, g));
        if (!std::isfinite(residual)) {
            throw Error(ErrorKind::NumericalFailure, "ground-state iteration produced non-finite values");
        }
        if (residual <= tol) {
            GroundState out{alpha, c, SpectralField(g, std::move(q)), it, residual};
            return out;
        }
        if (!(den > 0.0)) {
            throw Error(ErrorKind::Divergence, "ground-state iteration collapsed to zero", residual);
        }
        const double s = num / den;
        const double gain = s * s;
        for (std::size_t m = 0; m < ns; ++m) q2h[m] *= gain / sym[m];
        ctx.backward(q2h, q);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "ground-state iteration did not converge in %d iterations (residual %.3g)",
                  max_iter, residual);
    throw Error(ErrorKind::Divergence, buf, residual);
}

double spectral_tail(const SpectralField& q) {
    const auto coeffs = q.coefficients();
    double peak = 0.0, tail = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        peak = std::max(peak, std::abs(coeffs[m]));
        if (4 * m >= 3 * coeffs.size()) tail = std::max(tail, std::abs(coeffs[m]));
    }
    return peak > 0.0 ? tail / peak : 0.0;
}

GroundState solve_ground_state(double alpha, double c, const Grid& grid, double tol, int max_iter) {
    check_regime(alpha, c);
    const double width = std::pow(c, -1.0 / alpha);
    auto seed = SpectralField::from_function(grid, [c, width](double x) {
        const double s = 1.0 / std::cosh(0.5 * x / width);
        return 1.5 * c * s * s;
    });
    return solve_ground_state_from(alpha, c, seed, tol, max_iter);
}

GroundState rescale(const GroundState& q, double c_new, double tol) {
    if (!(c_new > 0.0) || !std::isfinite(c_new)) {
        throw Error(ErrorKind::InvalidInput, "rescale: speed must be positive", c_new);
    }
    if (c_new == q.speed) return q;
    const Grid& g = q.profile.grid();
    const double width = std::pow(c_new, -1.0 / q.alpha);
    if (width < 4.0 * g.dx()) {
        throw Error(ErrorKind::Resolution,
                    "rescaled width " + std::to_string(width) + " is below 4 grid spacings", width);
    }
    const double ratio = c_new / q.speed;
    const double lambda = std::pow(ratio, 1.0 / q.alpha);
    const double edge = 0.5 * g.box_length();

    std::vector<double> pts(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) pts[i] = std::clamp(lambda * g.x(i), -edge, edge);
    auto vals = interpolate(q.profile, pts);
    // Points mapped past the box edge follow the algebraic tail law.
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double xs = std::abs(lambda * g.x(i));
        if (xs > edge) vals[i] *= std::pow(edge / xs, 1.0 + q.alpha);
        vals[i] *= ratio;
    }
    SpectralField seed(g, std::move(vals));
    return solve_ground_state_from(q.alpha, c_new, seed, tol);
}

std::optional<SpectralField> closed_form_profile(double alpha, double c, const Grid& grid) {
    if (alpha == 2.0) {
        const double s = std::sqrt(c);
        return SpectralField::from_function(grid, [c, s](double x) {
            const double h = 1.0 / std::cosh(0.5 * s * x);
            return 1.5 * c * h * h;
        });
    }
    if (alpha == 1.0) {
        return SpectralField::from_function(grid, [c](double x) { return 2.0 * c / (1.0 + c * c * x * x); });
    }
    return std::nullopt;
}

DecayFit fit_decay_exponent(const GroundState& q, double x_lo, double x_hi) {
    const Grid& g = q.profile.grid();
    const double half = 0.5 * g.box_length();
    if (!(x_lo >= 0.0) || !(x_hi > x_lo)) {
        throw Error(ErrorKind::InvalidInput, "decay window must satisfy 0 <= x_lo < x_hi");
    }
    if (x_hi >= half - 10.0 * g.dx()) {
        throw Error(ErrorKind::Contamination, "decay window touches the box boundary", x_hi);
    }
    // An image at distance L - x stays 10x below Q(x) for a (1+x)^{-(1+a)} tail
    // when (L - x)/x exceeds 10^{1/(1+a)}.
    const double k = std::pow(10.0, 1.0 / (1.0 + q.alpha));
    const double limit = g.box_length() / (1.0 + k);
    if (x_hi > limit) {
        throw Error(ErrorKind::Contamination,
                    "decay window extends past " + std::to_string(limit) + " where periodic images matter",
                    x_hi);
    }

    const std::size_t n = g.size();
    const std::size_t centre = n / 2;
    std::vector<double> xs, ys;
    for (std::size_t i = centre; i < n; ++i) {
        const double x = g.x(i);
        if (x < x_lo || x > x_hi) continue;
        const std::size_t mirror = (n - i) % n;
        const double v = 0.5 * (q.profile[i] + q.profile[mirror]);
        if (v > 0.0) {
            xs.push_back(1.0 + x);
            ys.push_back(v);
        }
    }
    if (xs.size() < 3) {
        throw Error(ErrorKind::Resolution, "decay window holds fewer than three positive samples");
    }
    const auto fit = fit_loglog(xs, ys);
    DecayFit out;
    out.exponent = fit.slope;
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    out.samples = fit.samples;
    out.contamination_limit = limit;
    return out;
}

double mass_of(const SpectralField& u) { return inner(u, u); }

double energy_of(const SpectralField& u, double alpha) {
    double cubic = 0.0;
    for (double v : u.samples()) cubic += v * v * v;
    cubic *= u.grid().dx();
    return 0.5 * inner(u, riesz_apply(u, alpha)) - cubic / 3.0;
}

double mass_of(const GroundState& q) { return mass_of(q.profile); }
double energy_of(const GroundState& q) { return energy_of(q.profile, q.alpha); }

double gagliardo_nirenberg(const SpectralField& u, double alpha) {
    const double kinetic = inner(u, riesz_apply(u, alpha));
    const double mass = inner(u, u);
    double cubic = 0.0;
    for (double v : u.samples()) cubic += std::abs(v) * v * v;
    cubic *= u.grid().dx();
    if (!(cubic > 0.0)) throw Error(ErrorKind::InvalidInput, "Gagliardo-Nirenberg quotient of the zero field");
    return std::pow(kinetic, 1.0 / (2.0 * alpha)) * std::pow(mass, (3.0 * alpha - 1.0) / (2.0 * alpha)) / cubic;
}

}  // namespace fkdv
