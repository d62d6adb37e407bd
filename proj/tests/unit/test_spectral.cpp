#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fkdv/errors.hpp"
#include "fkdv/spectral.hpp"
#include "helpers.hpp"

using namespace fkdv;
using fkdv::test::gaussian;
using fkdv::test::max_abs_diff;

namespace {

struct RieszParams {
    double s, x;
};

double riesz_integrand(double k, void* p) {
    const auto* r = static_cast<RieszParams*>(p);
    return std::pow(k, r->s) * std::sqrt(std::numbers::pi) * std::exp(-0.25 * k * k) * std::cos(k * r->x);
}

/// |D|^s exp(-x^2) on the line by quadrature of its Fourier integral.
double riesz_gaussian_quadrature(double s, double x) {
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
    RieszParams params{s, x};
    gsl_function f{&riesz_integrand, &params};
    double result = 0.0, err = 0.0;
    gsl_integration_qag(&f, 0.0, 40.0, 1e-13, 1e-12, 2000, GSL_INTEG_GAUSS61, w, &result, &err);
    gsl_integration_workspace_free(w);
    return result / std::numbers::pi;
}

}  // namespace

TEST_CASE("grid layout") {
    const Grid g(64, 2.0 * std::numbers::pi);
    CHECK(g.size() == 64);
    CHECK(g.spectrum_size() == 33);
    CHECK(g.x(0) == doctest::Approx(-std::numbers::pi));
    CHECK(g.dx() == doctest::Approx(2.0 * std::numbers::pi / 64));
    CHECK(g.wavenumber(1) == doctest::Approx(1.0));
    CHECK(g.wavenumber(32) == doctest::Approx(-32.0));
    CHECK_THROWS_AS(Grid(63, 1.0), Error);
    CHECK_THROWS_AS(Grid(64, -1.0), Error);
}

TEST_CASE("derivatives of trigonometric data are exact") {
    const Grid g(128, 2.0 * std::numbers::pi);
    const auto u = SpectralField::from_function(g, [](double x) { return std::sin(3.0 * x); });
    const auto du = SpectralField::from_function(g, [](double x) { return 3.0 * std::cos(3.0 * x); });
    CHECK(max_abs_diff(deriv_x(u), du) < 1e-12);
    const auto d2u = SpectralField::from_function(g, [](double x) { return -9.0 * std::sin(3.0 * x); });
    CHECK(max_abs_diff(deriv_x(u, 2), d2u) < 1e-11);
    const auto r = riesz_apply(u, 0.7);
    CHECK(max_abs_diff(r, u * std::pow(3.0, 0.7)) < 1e-12);
}

TEST_CASE("riesz derivative of a Gaussian matches quadrature") {
    const Grid g(4096, 400.0);
    const auto u = gaussian(g);
    for (double s : {1.0, 1.5}) {
        const auto r = riesz_apply(u, s);
        double worst = 0.0;
        for (double x : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const auto i = static_cast<std::size_t>(std::lround((x - g.x(0)) / g.dx()));
            worst = std::max(worst, std::abs(r[i] - riesz_gaussian_quadrature(s, g.x(i))));
        }
        CAPTURE(s);
        CHECK(worst < 2e-5);
    }
}

TEST_CASE("riesz powers compose on mean-zero data") {
    const Grid g(256, 60.0);
    const auto u = deriv_x(gaussian(g, 1.0, 2.0));
    CHECK(max_abs_diff(riesz_apply(riesz_apply(u, 0.4), 0.9), riesz_apply(u, 1.3)) < 1e-12);
    CHECK(max_abs_diff(riesz_apply(u, 2.0), -1.0 * deriv_x(u, 2)) < 1e-10);
}

TEST_CASE("translation is exact for band-limited data") {
    const Grid g(256, 80.0);
    const auto u = gaussian(g, 0.0, 3.0);
    const auto shifted = translate(u, 2.37);
    CHECK(max_abs_diff(shifted, gaussian(g, 2.37, 3.0)) < 1e-12);
    CHECK(max_abs_diff(translate(shifted, -2.37), u) < 1e-12);
}

TEST_CASE("quadratures agree with Parseval") {
    const Grid g(512, 50.0);
    const auto u = fkdv::test::random_field(g, 3);
    const auto v = fkdv::test::random_field(g, 4);
    CHECK(inner(u, v) == doctest::Approx(spectral_inner(u, v)).epsilon(1e-12));
    CHECK(l2_norm(u) == doctest::Approx(std::sqrt(inner(u, u))));
    CHECK(integrate(gaussian(g)) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("Sobolev norm conventions") {
    const Grid g(128, 2.0 * std::numbers::pi);
    const auto u = SpectralField::from_function(g, [](double x) { return std::cos(2.0 * x); });
    // ||cos 2x||^2_{L2} = pi; <2> = sqrt(5).
    const double s = 0.75;
    CHECK(sobolev_norm(u, s) == doctest::Approx(std::sqrt(std::numbers::pi * std::pow(5.0, s))));
    CHECK(sobolev_norm(u, s, SobolevConvention::HalfWeight) ==
          doctest::Approx(std::sqrt(std::numbers::pi * std::pow(5.0, 0.5 * s))));
    CHECK(sobolev_norm(u, 0.0) == doctest::Approx(l2_norm(u)));
}

TEST_CASE("interpolation reproduces the trigonometric interpolant") {
    const Grid g(64, 2.0 * std::numbers::pi);
    const auto u = SpectralField::from_function(g, [](double x) { return std::sin(x) + 0.5 * std::cos(5.0 * x); });
    const std::vector<double> pts{0.123, -2.9, 3.0, 7.0};
    const auto vals = interpolate(u, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(vals[i] == doctest::Approx(std::sin(pts[i]) + 0.5 * std::cos(5.0 * pts[i])).epsilon(1e-12));
    }
}

TEST_CASE("dealiasing keeps the lower two thirds") {
    const Grid g(64, 2.0 * std::numbers::pi);
    const auto low = SpectralField::from_function(g, [](double x) { return std::cos(10.0 * x); });
    const auto high = SpectralField::from_function(g, [](double x) { return std::cos(30.0 * x); });
    CHECK(max_abs_diff(dealias(low), low) < 1e-13);
    CHECK(dealias(high).max_abs() < 1e-13);
}

TEST_CASE("grid mismatch is reported") {
    const auto a = SpectralField::zeros(Grid(64, 10.0));
    const auto b = SpectralField::zeros(Grid(64, 11.0));
    try {
        (void)inner(a, b);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GridMismatch);
    }
    CHECK_THROWS_AS(SpectralField(Grid(64, 10.0), std::vector<double>(32)), Error);
}
