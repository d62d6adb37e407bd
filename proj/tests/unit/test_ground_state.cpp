#include <cmath>
#include <numbers>
#include <utility>

#include "doctest.h"
#include "fkdv/errors.hpp"
#include "fkdv/ground_state.hpp"
#include "helpers.hpp"

using namespace fkdv;

namespace {

double cubic(const SpectralField& q) {
    double s = 0.0;
    for (double v : q.samples()) s += v * v * v;
    return s * q.grid().dx();
}

/// Normalised gradient flow u <- N (1 + tau |D|^a)^{-1} (u + tau u^2) at fixed mass.
/// A fixed point with factor N solves the profile equation for w = N u at c = (1 - N) / tau.
std::pair<SpectralField, double> gradient_flow(double alpha, const Grid& g, double mass, double tau, int steps) {
    auto u = fkdv::test::gaussian(g, 0.0, 3.0);
    u = u * std::sqrt(mass / mass_of(u));
    double factor = 1.0;
    for (int it = 0; it < steps; ++it) {
        const auto v = apply_multiplier(u + tau * (u * u),
                                        [&](double k) { return 1.0 / (1.0 + tau * std::pow(std::abs(k), alpha)); });
        factor = std::sqrt(mass / mass_of(v));
        u = v * factor;
    }
    return {u * factor, (1.0 - factor) / tau};
}

}  // namespace

TEST_CASE("KdV profile matches sech^2") {
    const Grid g(8192, 400.0);
    for (double c : {1.0, 2.5}) {
        const auto q = solve_ground_state(2.0, c, g);
        const auto exact = closed_form_profile(2.0, c, g);
        REQUIRE(exact);
        CHECK(fkdv::test::max_abs_diff(q.profile, *exact) / (1.5 * c) < 1e-8);
        CHECK(q.residual_norm <= 1e-10);
    }
}

TEST_CASE("KdV profile is reached from a Gaussian seed") {
    const Grid g(4096, 200.0);
    const auto seed = fkdv::test::gaussian(g, 0.0, 2.0);
    const auto q = solve_ground_state_from(2.0, 1.0, seed);
    CHECK(q.iterations > 10);
    CHECK(fkdv::test::max_abs_diff(q.profile, *closed_form_profile(2.0, 1.0, g)) / 1.5 < 1e-8);
}

TEST_CASE("alpha = 1.5 profile agrees with a gradient-flow minimiser") {
    const Grid g(4096, 400.0);
    const auto [u, c] = gradient_flow(1.5, g, 4.0, 2.0, 3000);
    REQUIRE(c > 0.0);
    const auto q = solve_ground_state(1.5, c, g, 1e-12);
    CHECK(fkdv::test::max_abs_diff(u, q.profile) / q.profile.max_abs() < 1e-6);
    MESSAGE("peak of Q_1 at alpha = 1.5: " << u.max_abs() / c);
}

TEST_CASE("KdV mass and energy") {
    const Grid g(8192, 400.0);
    const auto q = solve_ground_state(2.0, 1.0, g);
    CHECK(mass_of(q) == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(energy_of(q) == doctest::Approx(-1.8).epsilon(1e-10));
}

TEST_CASE("Benjamin-Ono profile matches 2c/(1 + c^2 x^2)") {
    const Grid g(16384, 800.0);
    const auto q = solve_ground_state(1.0, 1.0, g);
    const auto exact = closed_form_profile(1.0, 1.0, g);
    REQUIRE(exact);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.x(i)) <= 10.0) err = std::max(err, std::abs(q.profile[i] - (*exact)[i]));
    }
    CHECK(err / 2.0 < 5e-3);
    CHECK(mass_of(q) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-4));
}

TEST_CASE("profile identities from the equation and from dilation") {
    // K + cM = C and (a - 1) K / 2 - c M / 2 + C / 3 = 0 with K = <Q, |D|^a Q>.
    struct Case {
        double alpha, c;
        std::size_t n;
        double box;
    };
    for (const Case cs : {Case{2.0, 1.0, 4096, 200.0}, Case{1.5, 1.0, 8192, 800.0}, Case{0.8, 1.0, 16384, 800.0}}) {
        const Grid g(cs.n, cs.box);
        const auto q = solve_ground_state(cs.alpha, cs.c, g);
        const double k = inner(q.profile, riesz_apply(q.profile, cs.alpha));
        const double m = mass_of(q);
        const double c3 = cubic(q.profile);
        CAPTURE(cs.alpha);
        CHECK(std::abs(k + cs.c * m - c3) / c3 < 1e-9);
        CHECK(std::abs(0.5 * (cs.alpha - 1.0) * k - 0.5 * cs.c * m + c3 / 3.0) / c3 < 2e-3);
    }
}

TEST_CASE("profile is even, positive and decreasing") {
    const Grid g(8192, 800.0);
    const auto q = solve_ground_state(1.5, 1.0, g);
    const std::size_t mid = g.size() / 2;
    for (std::size_t i = 1; i < mid; ++i) {
        CHECK(q.profile[mid + i] == doctest::Approx(q.profile[mid - i]).epsilon(1e-10));
    }
    for (std::size_t i = mid; i + 1 < g.size() - g.size() / 8; ++i) {
        REQUIRE(q.profile[i] > 0.0);
        REQUIRE(q.profile[i + 1] < q.profile[i]);
    }
}

TEST_CASE("scaling law Q_c(x) = c Q_1(c^{1/a} x)") {
    const Grid g(8192, 800.0);
    const auto q1 = solve_ground_state(1.5, 1.0, g);
    const auto q2 = solve_ground_state(1.5, 2.0, g);
    const auto r = rescale(q1, 2.0);
    CHECK(fkdv::test::max_abs_diff(r.profile, q2.profile) / q2.profile.max_abs() < 1e-7);
    // Peak heights scale linearly in c.
    CHECK(q2.profile.max_abs() == doctest::Approx(2.0 * q1.profile.max_abs()).epsilon(1e-6));
}

TEST_CASE("algebraic decay exponent") {
    const Grid g(16384, 1600.0);
    const auto q = solve_ground_state(1.5, 1.0, g);
    const auto fit = fit_decay_exponent(q, 20.0, 300.0);
    CHECK(fit.exponent == doctest::Approx(-2.5).epsilon(0.08));
    CHECK_THROWS_AS(fit_decay_exponent(q, 20.0, 790.0), Error);
}

TEST_CASE("ground state minimises the Gagliardo-Nirenberg quotient") {
    const Grid g(4096, 200.0);
    for (double alpha : {1.0, 2.0}) {
        const auto q = solve_ground_state(alpha, 1.0, g);
        const double best = gagliardo_nirenberg(q.profile, alpha);
        for (unsigned seed = 1; seed <= 12; ++seed) {
            const auto u = fkdv::test::random_field(g, seed) + q.profile * 0.5;
            CHECK(gagliardo_nirenberg(u, alpha) >= best * (1.0 - 1e-9));
        }
        CHECK(gagliardo_nirenberg(q.profile * 3.0, alpha) == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("unsupported parameters are rejected") {
    const Grid g(1024, 100.0);
    try {
        (void)solve_ground_state(0.2, 1.0, g);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedRegime);
    }
    CHECK_THROWS_AS(solve_ground_state(2.5, 1.0, g), Error);
    CHECK_THROWS_AS(solve_ground_state(1.0, -1.0, g), Error);
    CHECK_THROWS_AS(solve_ground_state(1.0, 1.0, g, 0.0), Error);
}

TEST_CASE("spectral tail flags unresolved profiles") {
    CHECK(spectral_tail(solve_ground_state(2.0, 1.0, Grid(4096, 200.0)).profile) < 1e-12);
    CHECK(spectral_tail(solve_ground_state(1.0, 2.0, Grid(2048, 800.0)).profile) > 1e-4);
    CHECK(spectral_tail(SpectralField::zeros(Grid(64, 1.0))) == 0.0);
}
