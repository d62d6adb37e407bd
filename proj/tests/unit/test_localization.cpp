#include <gsl/gsl_integration.h>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fkdv/errors.hpp"
#include "fkdv/evolution.hpp"
#include "fkdv/localization.hpp"
#include "helpers.hpp"

using namespace fkdv;

namespace {

double bracket(double y, void* p) { return std::pow(1.0 + y * y, -0.5 * (1.0 + *static_cast<double*>(p))); }

/// int_x^inf <y>^{-(1+a)} dy by semi-infinite quadrature.
double tail_integral(double x, double alpha) {
    gsl_integration_workspace* w = gsl_integration_workspace_alloc(1000);
    gsl_function f{&bracket, &alpha};
    double r = 0.0, e = 0.0;
    gsl_integration_qagiu(&f, x, 0.0, 1e-12, 1000, w, &r, &e);
    gsl_integration_workspace_free(w);
    return r;
}

}  // namespace

TEST_CASE("weight normalisation") {
    CHECK(phi_normalization(1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    // <y>^{-3}: the integral is 2.
    CHECK(phi_normalization(2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(phi_normalization(0.0), Error);
}

TEST_CASE("weight profile against quadrature") {
    for (double alpha : {0.8, 1.0, 1.5}) {
        const double c = phi_normalization(alpha);
        for (double x : {-30.0, -2.0, -0.3, 0.0, 0.7, 5.0, 100.0}) {
            CAPTURE(alpha);
            CAPTURE(x);
            CHECK(phi_value(x, alpha) == doctest::Approx(c * tail_integral(x, alpha)).epsilon(1e-9));
        }
        CHECK(phi_value(0.0, alpha) == doctest::Approx(0.5));
        const double h = 1e-5;
        CHECK((phi_value(1.3 + h, alpha) - phi_value(1.3 - h, alpha)) / (2.0 * h) ==
              doctest::Approx(phi_derivative(1.3, alpha)).epsilon(1e-7));
    }
}

TEST_CASE("weight is decreasing from 1 to 0") {
    double prev = 1.0;
    for (int i = -400; i <= 400; ++i) {
        const double x = std::sinh(0.025 * i) * 10.0;
        const double v = phi_value(x, 1.2);
        CHECK(v <= prev);
        CHECK(v >= 0.0);
        prev = v;
    }
}

TEST_CASE("partition of unity and additivity of localized mass") {
    const Grid g(4096, 400.0);
    const SolitonEnsemble ens(1.5, {1.0, 2.0, 3.0}, g);
    const std::vector<double> rho{-60.0, 0.0, 60.0};
    const LocalizationKit kit(ens, rho, 10.0);
    for (std::size_t i = 0; i < g.size(); i += 7) {
        double s = 0.0;
        for (std::size_t j = 0; j < kit.size(); ++j) s += kit.psi(j)[i];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto u = assemble_R(ens, rho) + fkdv::test::random_field(g, 5) * 0.1;
    const auto lv = localized_functionals(u, kit);
    double m = 0.0, e = 0.0;
    for (std::size_t j = 0; j < kit.size(); ++j) {
        m += lv.mass[j];
        e += lv.energy[j];
        CHECK(lv.e_tilde[j] == doctest::Approx(lv.energy[j] + kit.sigma0() * lv.mass[j]));
        CHECK(localized_mass(u, kit, j) == doctest::Approx(lv.mass[j]).epsilon(1e-12));
    }
    CHECK(m == doctest::Approx(mass_of(u)).epsilon(1e-12));
    CHECK(e == doctest::Approx(energy_of(u, 1.5)).epsilon(1e-12));
    CHECK(kit.midpoints()[0] == doctest::Approx(-30.0));
}

TEST_CASE("sigma0 and resummation") {
    CHECK(sigma0({1.0, 2.0}) == doctest::Approx(1.0 / 6.0));
    CHECK(sigma0({1.0}) == doctest::Approx(0.25));
    const std::vector<double> c{1.0, 2.0, 3.5};
    const auto r = resummation_coefficients(c);
    CHECK(r.all_positive());
    const double s = sigma0(c);
    std::mt19937 rng(11);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> e(3), m(3);
        for (int j = 0; j < 3; ++j) {
            e[j] = n(rng);
            m[j] = n(rng);
        }
        double lhs = 0.0;
        for (int j = 0; j < 3; ++j) lhs += (e[j] + 0.5 * c[j] * m[j]) / (c[j] * c[j]);
        double rhs = 0.0, se = 0.0, sm = 0.0;
        for (int j = 0; j < 3; ++j) {
            se += e[j] + s * m[j];
            sm += m[j];
            if (j < 2) rhs += r.energy_partial[j] * se + r.mass_partial[j] * sm;
        }
        rhs += r.energy_total * se + r.mass_total * sm;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("kit guards") {
    const Grid g(1024, 100.0);
    CHECK_THROWS_AS(LocalizationKit(1.0, {1.0, 2.0}, {-10.0, 10.0}, 0.5, g), Error);
    CHECK_THROWS_AS(LocalizationKit(1.0, {1.0, 2.0}, {10.0, -10.0}, 5.0, g), Error);
    CHECK_THROWS_AS(LocalizationKit(1.0, {1.0, 2.0}, {-10.0, 48.0}, 5.0, g), Error);
}

TEST_CASE("expansion gaps of exact sums shrink with the cutoff scale") {
    const Grid g(8192, 800.0);
    const SolitonEnsemble ens(2.0, {1.0, 2.0}, g);
    const std::vector<double> rho{-100.0, 100.0};
    const auto u = assemble_R(ens, rho);
    const auto st = modulate(u, ens, rho);
    auto rows_for = [&](double A) { return expansion_audit(u, st, ens, LocalizationKit(ens, st.rho, A)); };
    const auto coarse = rows_for(10.0);
    const auto fine = rows_for(5.0);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(coarse[j].h_j) < 1e-20);
        // Weight tails are <y>^{-2}, so halving A quarters the leak.
        CHECK(coarse[j].mass_gap / fine[j].mass_gap == doctest::Approx(4.0).epsilon(0.1));
        CHECK(fine[j].mass_gap < 1e-2);
        CHECK(fine[j].energy_gap < 1e-2);
    }
}

TEST_CASE("monotonicity audit of synthetic histories") {
    std::vector<DiagnosticsRecord> recs;
    for (int k = 1; k <= 10; ++k) {
        DiagnosticsRecord r;
        r.t = 10.0 * k;
        // Mass leaks rightwards at rate (beta t)^{-a}.
        const double drift = std::pow(0.5 * r.t, -1.0);
        r.local_mass = {5.0 + drift, 7.0 - drift};
        r.e_tilde = {-1.0, -2.0};
        recs.push_back(r);
    }
    recs[3].tube_ok = false;
    const auto rep = monotonicity_audit(recs, 1.0, 0.5);
    CHECK(rep.final_time == 100.0);
    CHECK(rep.excluded_frames == 1);
    CHECK(rep.min_mass_scaled[0] == doctest::Approx(0.1 - 1.0).epsilon(1e-12));
    CHECK(rep.fitted_constant_mass == doctest::Approx(0.9));
    CHECK(rep.min_mass_scaled[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.fitted_constant_energy == 0.0);
}
