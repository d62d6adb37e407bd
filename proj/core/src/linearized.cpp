#include "fkdv/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fkdv/errors.hpp"

namespace fkdv {

std::vector<double> free_operator_matrix(const Grid& grid, double alpha, double c) {
    const std::size_t n = grid.size();
    std::vector<Complex> sym(grid.spectrum_size());
    for (std::size_t m = 0; m < sym.size(); ++m) sym[m] = std::pow(std::abs(grid.wavenumber(m)), alpha) + c;
    sym[0] = c;
    std::vector<double> col(n);
    thread_context(grid).backward(sym, col);
    std::vector<double> mat(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) mat[i + j * n] = col[(i + n - j) % n];
    }
    return mat;
}

OperatorMatrix::OperatorMatrix(const GroundState& q)
    : grid_(q.profile.grid()), alpha_(q.alpha), c_(q.speed),
      potential_(SpectralField::constant(q.profile.grid(), q.speed) - 2.0 * q.profile) {
    const std::size_t n = grid_.size();
    if (n <= kDenseLimit) {
        matrix_ = free_operator_matrix(grid_, alpha_, 0.0);
        for (std::size_t i = 0; i < n; ++i) matrix_[i + i * n] += potential_[i];
    }
}

void OperatorMatrix::apply(std::span<const double> in, std::span<double> out) const {
    const SpectralField u(grid_, std::vector<double>(in.begin(), in.end()));
    const SpectralField d = riesz_apply(u, alpha_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[i] + potential_[i] * in[i];
}

SpectralField OperatorMatrix::apply(const SpectralField& u) const {
    require_same_grid(u, potential_);
    return riesz_apply(u, alpha_) + potential_ * u;
}

double OperatorMatrix::symmetry_defect() const {
    if (matrix_.empty()) return 0.0;
    const std::size_t n = size();
    double defect = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            defect = std::max(defect, std::abs(matrix_[i + j * n] - matrix_[j + i * n]));
            peak = std::max(peak, std::abs(matrix_[i + j * n]));
        }
    }
    return peak > 0.0 ? defect / peak : 0.0;
}

OperatorMatrix assemble_linearized(const GroundState& q) {
    const double tail = spectral_tail(q.profile);
    if (tail > 1e-8) {
        throw Error(ErrorKind::Resolution,
                    "ground state is not resolved: upper-quarter spectrum at " + std::to_string(tail) + " of peak",
                    tail);
    }
    return OperatorMatrix(q);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_weight_power(double alpha, SobolevConvention convention) {
    // ||u||^2_{H^{a/2}} = sum <k>^{2p} |u_k|^2
    return convention == SobolevConvention::Standard ? 0.5 * alpha : 0.25 * alpha;
}

}  // namespace

SpectrumReport spectrum(const OperatorMatrix& op, const GroundState& q, std::size_t k) {
    SpectrumReport report;
    if (op.is_dense()) {
        report.pairs = dense_lowest(op.matrix(), op.size(), k);
    } else {
        LanczosOptions opts;
        opts.max_basis = 2000;
        opts.tol = 1e-9;
        report.pairs = lanczos_lowest([&op](std::span<const double> in, std::span<double> out) { op.apply(in, out); },
                                      op.size(), k, opts);
    }
    const auto& vals = report.pairs.values;
    const SpectralField dq = deriv_x(q.profile);
    const double dq_norm = std::sqrt(dot(dq.samples(), dq.samples()));

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < -1e-6) ++report.negative_count;
        if (std::abs(vals[i]) < best) {
            best = std::abs(vals[i]);
            report.zero_index = i;
        }
    }
    report.zero_value = vals[report.zero_index];
    const auto& z = report.pairs.vectors[report.zero_index];
    report.zero_alignment = std::abs(dot(z, dq.samples())) / (std::sqrt(dot(z, z)) * dq_norm);

    report.continuum_onset = std::numeric_limits<double>::quiet_NaN();
    for (double v : vals) {
        if (v >= op.speed() - 0.05) {
            report.continuum_onset = v;
            break;
        }
        report.discrete.push_back(v);
    }

    const auto& w0 = report.pairs.vectors.front();
    const std::size_t n = w0.size();
    double peak = 0.0, asym = 0.0;
    for (double v : w0) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) asym = std::max(asym, std::abs(w0[i] - w0[(n - i) % n]));
    report.ground_even = asym <= 1e-6 * peak;
    std::size_t pos = 0, neg = 0;
    for (double v : w0) {
        if (v > 1e-10 * peak) ++pos;
        if (v < -1e-10 * peak) ++neg;
    }
    report.ground_sign_definite = pos == 0 || neg == 0;
    return report;
}

EigenPairs constrained_rayleigh(const LinearOperator& t_op, const Grid& grid, double alpha,
                                const std::vector<SpectralField>& constraints, std::size_t k,
                                SobolevConvention convention) {
    const std::size_t n = grid.size();
    const double p = norm_weight_power(alpha, convention);
    auto inv_sqrt_weight = [p](double kk) { return std::pow(1.0 + kk * kk, -0.5 * p); };

    // Orthonormal basis of H^{-1/2} g for the constraints g.
    std::vector<std::vector<double>> basis;
    for (const auto& g : constraints) {
        const SpectralField h = apply_multiplier(g, inv_sqrt_weight);
        std::vector<double> v(h.samples().begin(), h.samples().end());
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : basis) {
                const double c = dot(v, e);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * e[i];
            }
        }
        const double nv = std::sqrt(dot(v, v));
        if (nv < 1e-12) continue;
        for (double& x : v) x /= nv;
        basis.push_back(std::move(v));
    }
    auto project = [&basis, n](std::span<double> v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : basis) {
                const double c = dot(v, e);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * e[i];
            }
        }
    };
    std::vector<double> work(n), tout(n);
    LinearOperator conj = [&](std::span<const double> in, std::span<double> out) {
        std::copy(in.begin(), in.end(), work.begin());
        project(work);
        const SpectralField u = apply_multiplier(SpectralField(grid, work), inv_sqrt_weight);
        t_op(u.samples(), tout);
        const SpectralField back = apply_multiplier(SpectralField(grid, tout), inv_sqrt_weight);
        std::copy(back.samples().begin(), back.samples().end(), out.begin());
        project(out);
    };

    EigenPairs pairs;
    if (n <= kDenseLimit) {
        auto m = dense_from_operator(conj, n);
        // Push the constraint directions far above the spectrum of interest.
        const double shift = 1e6;
        for (const auto& e : basis) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) m[i + j * n] += shift * e[i] * e[j];
            }
        }
        pairs = dense_lowest(std::move(m), n, k);
    } else {
        LanczosOptions opts;
        opts.project = project;
        opts.tol = 1e-8;
        opts.max_basis = 1200;
        pairs = lanczos_lowest(conj, n, k, opts);
    }
    for (auto& v : pairs.vectors) {
        const SpectralField u = apply_multiplier(SpectralField(grid, v), inv_sqrt_weight);
        v.assign(u.samples().begin(), u.samples().end());
    }
    return pairs;
}

CoercivityResult coercivity_constant(const GroundState& q, std::size_t k, SobolevConvention convention) {
    const OperatorMatrix op = assemble_linearized(q);
    const std::vector<SpectralField> constraints{q.profile, deriv_x(q.profile)};
    const auto pairs = constrained_rayleigh(
        [&op](std::span<const double> in, std::span<double> out) { op.apply(in, out); }, op.grid(), q.alpha,
        constraints, k, convention);
    CoercivityResult r;
    r.mu = pairs.values.front();
    r.lowest = pairs.values;
    r.n = op.size();
    if (r.mu < -1e-8) {
        throw Error(ErrorKind::NumericalFailure,
                    "coercivity violated on {Q, Q'}-perp: discretisation suspect", r.mu);
    }
    return r;
}

double rayleigh_quotient(const GroundState& q, const SpectralField& u, SobolevConvention convention) {
    const OperatorMatrix op(q);
    const double h = sobolev_norm(u, 0.5 * q.alpha, convention);
    return inner(u, op.apply(u)) / (h * h);
}

namespace {

struct HjPieces {
    std::vector<SpectralField> r, dr;
    SpectralField weight;  // sum_j psi_j (c_j - 2 R_j)
};

HjPieces hj_pieces(const SolitonEnsemble& ens, const std::vector<double>& rho, const LocalizationKit& kit) {
    HjPieces p{{}, {}, SpectralField::zeros(ens.grid())};
    for (std::size_t j = 0; j < ens.size(); ++j) {
        p.r.push_back(ens.shifted(j, rho[j]));
        p.dr.push_back(ens.shifted(j, rho[j], 1));
        p.weight += kit.psi(j) * (SpectralField::constant(ens.grid(), ens.speeds()[j]) - 2.0 * p.r.back());
    }
    return p;
}

struct HjParts {
    double quad, penalty, norm_sq;
};

HjParts hj_parts(const SpectralField& eta, const HjPieces& p, double alpha) {
    HjParts out{};
    out.quad = inner(eta, riesz_apply(eta, alpha)) + inner(eta * eta, p.weight);
    for (std::size_t j = 0; j < p.r.size(); ++j) {
        const double a = inner(eta, p.r[j]);
        const double b = inner(eta, p.dr[j]);
        out.penalty += a * a + b * b;
    }
    const double h = sobolev_norm(eta, 0.5 * alpha);
    out.norm_sq = h * h;
    return out;
}

double critical_nu(const HjParts& parts) {
    if (!(parts.norm_sq > 0.0)) return std::numeric_limits<double>::infinity();
    return (parts.quad + std::sqrt(parts.quad * parts.quad + 4.0 * parts.norm_sq * parts.penalty)) /
           (2.0 * parts.norm_sq);
}

}  // namespace

double hj_expression(const SpectralField& eta, const SolitonEnsemble& ens, const std::vector<double>& rho,
                     const LocalizationKit& kit, double nu) {
    const auto p = hj_pieces(ens, rho, kit);
    const auto parts = hj_parts(eta, p, ens.alpha());
    return parts.quad + parts.penalty / nu - nu * parts.norm_sq;
}

double hj_critical_nu(const SpectralField& eta, const SolitonEnsemble& ens, const std::vector<double>& rho,
                      const LocalizationKit& kit) {
    const auto p = hj_pieces(ens, rho, kit);
    return critical_nu(hj_parts(eta, p, ens.alpha()));
}

HjAuditReport hj_lower_bound_audit(const ModulationState& state, const SolitonEnsemble& ens,
                                   const std::vector<double>& a_values, std::size_t battery_size,
                                   std::uint64_t seed) {
    const Grid& g = ens.grid();
    HjAuditReport report;
    report.seed = seed;

    // Battery: the live residual plus seeded band-limited fields under Gaussian
    // envelopes placed on the solitons and between them.
    std::vector<SpectralField> battery;
    if (l2_norm(state.eta) > 0.0) battery.push_back(state.eta);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double kc = std::min(3.0, (2.0 / 3.0) * g.max_wavenumber());
    for (std::size_t b = 0; b < battery_size; ++b) {
        std::vector<Complex> coef(g.spectrum_size());
        for (std::size_t m = 1; m < coef.size(); ++m) {
            if (std::abs(g.wavenumber(m)) <= kc) coef[m] = Complex{normal(rng), normal(rng)};
        }
        const SpectralField carrier = SpectralField::from_coefficients(g, coef);
        const std::size_t j = b % ens.size();
        double centre = state.rho[j];
        if (b % 3 == 2 && j + 1 < ens.size()) centre = 0.5 * (state.rho[j] + state.rho[j + 1]);
        const double width = 1.0 + 7.0 * unif(rng);
        const SpectralField env = SpectralField::from_function(g, [=](double x) {
            const double s = (x - centre) / width;
            return std::exp(-0.5 * s * s);
        });
        battery.push_back(carrier * env);
    }

    for (double a : a_values) {
        const LocalizationKit kit(ens, state.rho, a);
        const auto pieces = hj_pieces(ens, state.rho, kit);
        HjAuditRow row;
        row.A = a;
        row.nu_battery = std::numeric_limits<double>::infinity();
        for (const auto& eta : battery) row.nu_battery = std::min(row.nu_battery, critical_nu(hj_parts(eta, pieces, ens.alpha())));

        std::vector<SpectralField> constraints;
        for (std::size_t j = 0; j < ens.size(); ++j) {
            constraints.push_back(pieces.r[j]);
            constraints.push_back(pieces.dr[j]);
        }
        const double alpha = ens.alpha();
        const SpectralField weight = pieces.weight;
        const auto pairs = constrained_rayleigh(
            [&](std::span<const double> in, std::span<double> out) {
                const SpectralField u(g, std::vector<double>(in.begin(), in.end()));
                const SpectralField d = riesz_apply(u, alpha);
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[i] + weight[i] * in[i];
            },
            g, alpha, constraints, 1);
        row.nu_constrained = pairs.values.front();
        const SpectralField worst(g, pairs.vectors.front());
        row.nu_battery = std::min(row.nu_battery, critical_nu(hj_parts(worst, pieces, alpha)));
        row.battery_size = battery.size() + 1;
        report.rows.push_back(row);
    }
    report.positive = std::all_of(report.rows.begin(), report.rows.end(),
                                  [](const HjAuditRow& r) { return r.nu_battery > 0.0 && r.nu_constrained > 0.0; });
    if (report.rows.size() >= 2) {
        const auto lo = std::min_element(report.rows.begin(), report.rows.end(),
                                         [](const HjAuditRow& x, const HjAuditRow& y) { return x.A < y.A; });
        const auto hi = std::max_element(report.rows.begin(), report.rows.end(),
                                         [](const HjAuditRow& x, const HjAuditRow& y) { return x.A < y.A; });
        report.stable_in_A = hi->nu_battery >= 0.95 * lo->nu_battery;
    }
    return report;
}

}  // namespace fkdv
