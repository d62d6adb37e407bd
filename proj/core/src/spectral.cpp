#include "fkdv/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "fkdv/errors.hpp"

namespace fkdv {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

// Grid ------------------------------------------------------------------------

Grid::Grid(std::size_t n_points, double box_length) : n_(n_points), box_(box_length), dx_(0.0) {
    if (n_points < 16 || !std::has_single_bit(n_points)) {
        throw Error(ErrorKind::InvalidInput,
                    "grid size must be a power of two >= 16, got " + std::to_string(n_points));
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw Error(ErrorKind::InvalidInput, "box length must be positive and finite");
    }
    dx_ = box_ / static_cast<double>(n_);
}

std::vector<double> Grid::coordinates() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
}

double Grid::wavenumber(std::size_t m) const noexcept {
    const double k1 = 2.0 * std::numbers::pi / box_;
    if (m == n_ / 2) return -k1 * static_cast<double>(m);
    return k1 * static_cast<double>(m);
}

double Grid::max_wavenumber() const noexcept {
    return std::numbers::pi * static_cast<double>(n_) / box_;
}

// SpectralContext ---------------------------------------------------------------

struct SpectralContext::Impl {
    Grid grid;
    double* real_buf = nullptr;
    fftw_complex* spec_buf = nullptr;
    fftw_plan forward_plan = nullptr;
    fftw_plan backward_plan = nullptr;

    explicit Impl(const Grid& g) : grid(g) {
        const int n = static_cast<int>(g.size());
        real_buf = fftw_alloc_real(g.size());
        spec_buf = fftw_alloc_complex(g.spectrum_size());
        std::lock_guard lock(planner_mutex());
        forward_plan = fftw_plan_dft_r2c_1d(n, real_buf, spec_buf, FFTW_ESTIMATE);
        backward_plan = fftw_plan_dft_c2r_1d(n, spec_buf, real_buf, FFTW_ESTIMATE);
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(backward_plan);
        fftw_destroy_plan(forward_plan);
        fftw_free(spec_buf);
        fftw_free(real_buf);
    }
};

SpectralContext::SpectralContext(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}

SpectralContext::~SpectralContext() = default;

const Grid& SpectralContext::grid() const noexcept { return impl_->grid; }

void SpectralContext::forward(std::span<const double> in, std::span<Complex> out) {
    const std::size_t n = impl_->grid.size();
    std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(n), impl_->real_buf);
    fftw_execute(impl_->forward_plan);
    auto* spec = reinterpret_cast<const Complex*>(impl_->spec_buf);
    std::copy(spec, spec + impl_->grid.spectrum_size(), out.begin());
}

void SpectralContext::backward(std::span<const Complex> in, std::span<double> out) {
    const std::size_t n = impl_->grid.size();
    auto* spec = reinterpret_cast<Complex*>(impl_->spec_buf);
    std::copy(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(impl_->grid.spectrum_size()), spec);
    fftw_execute(impl_->backward_plan);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = impl_->real_buf[i] * scale;
}

SpectralContext& thread_context(const Grid& grid) {
    thread_local std::vector<std::unique_ptr<SpectralContext>> contexts;
    for (auto& ctx : contexts) {
        if (ctx->grid() == grid) return *ctx;
    }
    contexts.push_back(std::make_unique<SpectralContext>(grid));
    return *contexts.back();
}

// SpectralField ----------------------------------------------------------------

SpectralField::SpectralField(Grid grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) {
        throw Error(ErrorKind::InvalidInput, "sample count " + std::to_string(samples_.size()) +
                                                 " does not match grid size " +
                                                 std::to_string(grid_.size()));
    }
}

SpectralField SpectralField::zeros(const Grid& grid) {
    return SpectralField(grid, std::vector<double>(grid.size(), 0.0));
}

SpectralField SpectralField::constant(const Grid& grid, double value) {
    return SpectralField(grid, std::vector<double>(grid.size(), value));
}

SpectralField SpectralField::from_function(const Grid& grid, const std::function<double(double)>& f) {
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = f(grid.x(i));
    return SpectralField(grid, std::move(s));
}

SpectralField SpectralField::from_coefficients(const Grid& grid, std::span<const Complex> coefficients) {
    if (coefficients.size() != grid.spectrum_size()) {
        throw Error(ErrorKind::InvalidInput, "coefficient count does not match grid");
    }
    std::vector<double> s(grid.size());
    thread_context(grid).backward(coefficients, s);
    return SpectralField(grid, std::move(s));
}

std::vector<Complex> SpectralField::coefficients() const {
    std::vector<Complex> c(grid_.spectrum_size());
    thread_context(grid_).forward(samples_, c);
    return c;
}

double SpectralField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
}

bool SpectralField::all_finite() const noexcept {
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

SpectralField SpectralField::operator-() const {
    SpectralField out = *this;
    for (double& v : out.samples_) v = -v;
    return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
    for (double& v : samples_) v *= scale;
    return *this;
}

SpectralField operator*(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    std::vector<double> s(a.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.samples_[i] * b.samples_[i];
    return SpectralField(a.grid(), std::move(s));
}

void require_same_grid(const SpectralField& f, const SpectralField& g) {
    if (!(f.grid() == g.grid())) {
        throw Error(ErrorKind::GridMismatch,
                    "fields live on different grids (n=" + std::to_string(f.grid().size()) + ", L=" +
                        std::to_string(f.grid().box_length()) + " vs n=" +
                        std::to_string(g.grid().size()) + ", L=" +
                        std::to_string(g.grid().box_length()) + ")");
    }
}

// Operators -------------------------------------------------------------------

namespace {

template <typename Fn>
SpectralField map_spectrum(const SpectralField& f, Fn&& fn) {
    const Grid& g = f.grid();
    auto& ctx = thread_context(g);
    std::vector<Complex> c(g.spectrum_size());
    ctx.forward(f.samples(), c);
    for (std::size_t m = 0; m < c.size(); ++m) c[m] = fn(m, g.wavenumber(m), c[m]);
    std::vector<double> out(g.size());
    ctx.backward(c, out);
    return SpectralField(g, std::move(out));
}

}  // namespace

SpectralField riesz_apply(const SpectralField& f, double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::InvalidInput, "Riesz exponent must be finite and >= 0");
    }
    if (!f.all_finite()) throw Error(ErrorKind::InvalidInput, "non-finite samples passed to |D|^s");
    if (s == 0.0) return f;
    return map_spectrum(f, [s](std::size_t m, double k, Complex c) {
        return m == 0 ? Complex{} : c * std::pow(std::abs(k), s);
    });
}

SpectralField deriv_x(const SpectralField& f, int order) {
    if (order < 0) throw Error(ErrorKind::InvalidInput, "derivative order must be non-negative");
    if (order == 0) return f;
    const std::size_t nyquist = f.grid().size() / 2;
    return map_spectrum(f, [order, nyquist](std::size_t m, double k, Complex c) {
        if (m == nyquist && order % 2 == 1) return Complex{};
        Complex factor{1.0, 0.0};
        const Complex ik{0.0, k};
        for (int p = 0; p < order; ++p) factor *= ik;
        return c * factor;
    });
}

SpectralField apply_multiplier(const SpectralField& f, const std::function<double(double)>& symbol) {
    return map_spectrum(f, [&symbol](std::size_t, double k, Complex c) { return c * symbol(std::abs(k)); });
}

SpectralField translate(const SpectralField& f, double shift) {
    const std::size_t nyquist = f.grid().size() / 2;
    return map_spectrum(f, [shift, nyquist](std::size_t m, double k, Complex c) {
        // The Nyquist mode of a real field cannot carry a phase; keep its
        // real projection.
        if (m == nyquist) return Complex{c.real() * std::cos(k * shift), 0.0};
        return c * std::polar(1.0, -k * shift);
    });
}

SpectralField dealias(const SpectralField& f) {
    const double cutoff = (2.0 / 3.0) * f.grid().max_wavenumber();
    return map_spectrum(f, [cutoff](std::size_t, double k, Complex c) {
        return std::abs(k) > cutoff ? Complex{} : c;
    });
}

double integrate(const SpectralField& f) {
    double sum = 0.0;
    for (double v : f.samples()) sum += v;
    return sum * f.grid().dx();
}

double inner(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g);
    double sum = 0.0;
    auto a = f.samples();
    auto b = g.samples();
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum * f.grid().dx();
}

namespace {

// Sum over the full spectrum of w(|k|) * Re(conj(fhat) ghat), using the
// Hermitian half spectrum (interior modes counted twice).
double weighted_spectral_sum(const std::vector<Complex>& fc, const std::vector<Complex>& gc,
                             const Grid& grid, const std::function<double(double)>& weight) {
    const std::size_t half = grid.size() / 2;
    double sum = 0.0;
    for (std::size_t m = 0; m <= half; ++m) {
        const double mult = (m == 0 || m == half) ? 1.0 : 2.0;
        sum += mult * weight(std::abs(grid.wavenumber(m))) * (std::conj(fc[m]) * gc[m]).real();
    }
    const double n = static_cast<double>(grid.size());
    return sum * grid.dx() / n;
}

}  // namespace

double spectral_inner(const SpectralField& f, const SpectralField& g) {
    require_same_grid(f, g);
    return weighted_spectral_sum(f.coefficients(), g.coefficients(), f.grid(), [](double) { return 1.0; });
}

double l2_norm(const SpectralField& f) { return std::sqrt(inner(f, f)); }

double sobolev_norm(const SpectralField& f, double s, SobolevConvention convention) {
    const double power = convention == SobolevConvention::Standard ? s : 0.5 * s;
    const auto c = f.coefficients();
    const double sq = weighted_spectral_sum(c, c, f.grid(), [power](double k) {
        return std::pow(1.0 + k * k, power);  // <k>^{2*power}
    });
    return std::sqrt(sq);
}

std::vector<double> interpolate(const SpectralField& f, std::span<const double> points) {
    const Grid& g = f.grid();
    const auto c = f.coefficients();
    const std::size_t half = g.size() / 2;
    const double x0 = g.x(0);
    const double k1 = 2.0 * std::numbers::pi / g.box_length();
    const double inv_n = 1.0 / static_cast<double>(g.size());
    std::vector<double> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double xi = points[p] - x0;
        const Complex step = std::polar(1.0, k1 * xi);
        Complex phase{1.0, 0.0};
        double sum = c[0].real();
        for (std::size_t m = 1; m < half; ++m) {
            phase *= step;
            sum += 2.0 * (c[m] * phase).real();
        }
        sum += c[half].real() * std::cos(k1 * static_cast<double>(half) * xi);
        out[p] = sum * inv_n;
    }
    return out;
}

}  // namespace fkdv
