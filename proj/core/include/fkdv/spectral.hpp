#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fkdv {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2) standing in for the real line.
///
/// Samples sit at x_i = -L/2 + i*dx. Spectral data uses the real-to-complex
/// half spectrum: index m in [0, n/2] carries wavenumber 2*pi*m/L, and the
/// last entry is the Nyquist mode (wavenumber -n/2 in the symmetric
/// convention, same modulus).
class Grid {
public:
    Grid(std::size_t n_points, double box_length);

    std::size_t size() const noexcept { return n_; }
    double box_length() const noexcept { return box_; }
    double dx() const noexcept { return dx_; }
    double x(std::size_t i) const noexcept { return -0.5 * box_ + static_cast<double>(i) * dx_; }
    std::vector<double> coordinates() const;

    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }
    /// Signed wavenumber of half-spectrum entry m (Nyquist reported as negative).
    double wavenumber(std::size_t m) const noexcept;
    double max_wavenumber() const noexcept;

    bool operator==(const Grid& other) const noexcept {
        return n_ == other.n_ && box_ == other.box_;
    }

private:
    std::size_t n_;
    double box_;
    double dx_;
};

/// Real-valued periodic field: collocation samples tied to their grid.
///
/// Immutable after construction; coefficients are computed on demand through
/// the calling thread's transform context, so values are safe to share
/// read-only across threads.
class SpectralField {
public:
    SpectralField(Grid grid, std::vector<double> samples);

    static SpectralField zeros(const Grid& grid);
    static SpectralField constant(const Grid& grid, double value);
    static SpectralField from_function(const Grid& grid, const std::function<double(double)>& f);
    /// Inverse transform of a half spectrum (forward unnormalized convention).
    static SpectralField from_coefficients(const Grid& grid, std::span<const Complex> coefficients);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const double> samples() const noexcept { return samples_; }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Unnormalized forward transform (half spectrum, Hermitian symmetry implied).
    std::vector<Complex> coefficients() const;

    double max_abs() const noexcept;
    bool all_finite() const noexcept;

    SpectralField operator-() const;
    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double scale);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    /// Pointwise product.
    friend SpectralField operator*(const SpectralField& a, const SpectralField& b);

private:
    Grid grid_;
    std::vector<double> samples_;
};

/// FFT plans and aligned workspaces for one grid. Not thread-safe: use one
/// context per thread (see thread_context).
class SpectralContext {
public:
    explicit SpectralContext(const Grid& grid);
    ~SpectralContext();
    SpectralContext(const SpectralContext&) = delete;
    SpectralContext& operator=(const SpectralContext&) = delete;

    const Grid& grid() const noexcept;

    /// Forward transform, unnormalized: out_m = sum_i in_i exp(-2 pi i m i / n).
    void forward(std::span<const double> in, std::span<Complex> out);
    /// Inverse transform including the 1/n factor.
    void backward(std::span<const Complex> in, std::span<double> out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// The calling thread's context for `grid` (created on first use).
SpectralContext& thread_context(const Grid& grid);

/// Which power of the Japanese bracket weights the H^s norm.
/// Standard: sum <k>^{2s} |f_k|^2. HalfWeight: sum <k>^{s} |f_k|^2.
enum class SobolevConvention { Standard, HalfWeight };

// Fourier-multiplier operators ------------------------------------------------

/// |D|^s f: multiplies coefficients by |k|^s; the zero mode maps to 0 for s > 0.
SpectralField riesz_apply(const SpectralField& f, double s);
/// d^order f / dx^order. The Nyquist mode is dropped for odd orders.
SpectralField deriv_x(const SpectralField& f, int order = 1);
/// Applies an even real multiplier m(|k|) to f.
SpectralField apply_multiplier(const SpectralField& f, const std::function<double(double)>& symbol);
/// x -> f(x - shift), exact for band-limited data.
SpectralField translate(const SpectralField& f, double shift);
/// Zeroes modes with |k| above 2/3 of the maximum wavenumber.
SpectralField dealias(const SpectralField& f);

// Quadratures -----------------------------------------------------------------

double integrate(const SpectralField& f);
double inner(const SpectralField& f, const SpectralField& g);
/// Inner product evaluated from the coefficients (Parseval route).
double spectral_inner(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);
double sobolev_norm(const SpectralField& f, double s,
                    SobolevConvention convention = SobolevConvention::Standard);
/// Evaluates the trigonometric interpolant of f at arbitrary (wrapped) points.
std::vector<double> interpolate(const SpectralField& f, std::span<const double> points);

/// Throws ErrorKind::GridMismatch unless both fields share a grid.
void require_same_grid(const SpectralField& f, const SpectralField& g);

}  // namespace fkdv
