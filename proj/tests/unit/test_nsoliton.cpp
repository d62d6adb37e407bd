#include <cmath>

#include "doctest.h"
#include "fkdv/errors.hpp"
#include "fkdv/nsoliton.hpp"

using namespace fkdv;

namespace {

ExperimentPlan small_plan() {
    ExperimentPlan p;
    p.alpha = 2.0;
    p.speeds = {1.0, 2.0};
    p.s_n = 80.0;
    p.t0 = 40.0;
    p.box_length = 300.0;
    p.n_points = 2048;
    p.dt = 0.01;
    p.record_interval = 2.0;
    p.A = 5.0;
    return p;
}

}  // namespace

TEST_CASE("plan validation") {
    auto p = small_plan();
    CHECK_NOTHROW(p.validate());
    CHECK(p.offset_limit() == doctest::Approx(std::sqrt(80.0)));
    CHECK(p.frame_speed() == doctest::Approx(1.5));
    const auto y = p.seed_positions();
    CHECK(y[0] == doctest::Approx(-40.0));
    CHECK(y[1] == doctest::Approx(40.0));

    p.offsets = {10.0, 0.0};
    CHECK_THROWS_AS(p.validate(), Error);
    p.offsets = {1.0};
    CHECK_THROWS_AS(p.validate(), Error);
    p = small_plan();
    p.speeds = {2.0, 1.0};
    CHECK_THROWS_AS(p.validate(), Error);
    p = small_plan();
    p.t0 = 90.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = small_plan();
    p.box_length = 100.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = small_plan();
    p.alpha = 0.4;
    try {
        p.validate();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedRegime);
    }
}

TEST_CASE("verdicts recover power laws from synthetic frames") {
    ExperimentPlan p = small_plan();
    p.alpha = 1.0;
    p.s_n = 300.0;
    p.t0 = 50.0;
    std::vector<DiagnosticsRecord> recs;
    for (double t = 300.0; t >= 50.0; t -= 5.0) {
        DiagnosticsRecord r;
        r.t = t;
        r.eta_h = 3.0 / std::sqrt(t);
        r.rho = {t, 2.0 * t};
        r.rho_dot = {1.0 + 2.0 / std::sqrt(t), 2.0 - 1.0 / std::sqrt(t)};
        r.mass = 10.0;
        r.energy = -3.0;
        recs.push_back(r);
    }
    const auto v = construction_verdicts(p, recs);
    CHECK(v.eta_slope == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(v.velocity_slope == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(v.c0_eta == doctest::Approx(3.0));
    CHECK(v.c0_velocity == doctest::Approx(2.0));
    CHECK(v.bootstrap == 0.0);
    CHECK(v.fit_t_max == doctest::Approx(150.0));
    CHECK(v.fit_samples == 21);
    CHECK(v.eta_slope_ok);
    CHECK(v.mass_drift == 0.0);
}

TEST_CASE("bootstrap exits are transversal when the offset grows towards small t") {
    ExperimentPlan p = small_plan();
    p.s_n = 300.0;
    p.t0 = 50.0;
    std::vector<DiagnosticsRecord> recs;
    for (double t = 300.0; t >= 50.0; t -= 1.0) {
        DiagnosticsRecord r;
        r.t = t;
        // Drift (rho_1 - t) t^{-1/2} = 600 / t^{3/2} crosses 1 at t = 600^{2/3}.
        r.rho = {t + 600.0 / t, 2.0 * t};
        recs.push_back(r);
    }
    const auto out = bootstrap_exit(p, recs);
    REQUIRE(out.exit_time);
    CHECK(*out.exit_time == doctest::Approx(std::pow(600.0, 2.0 / 3.0)).epsilon(0.02));
    CHECK(out.transversal);
    CHECK(bootstrap_functional(p, recs.front()) == doctest::Approx(std::pow(600.0 / std::pow(300.0, 1.5), 2.0)));
}

TEST_CASE("a single soliton is reproduced exactly") {
    ExperimentPlan p = small_plan();
    p.speeds = {1.0};
    p.s_n = 60.0;
    p.t0 = 50.0;
    p.box_length = 200.0;
    p.n_points = 1024;
    const auto r = run_construction(p);
    REQUIRE(r.ok());
    CHECK(r.verdicts.c0_eta < 1e-4);
    CHECK(r.records.front().t == doctest::Approx(60.0));
    CHECK(r.records.back().t == doctest::Approx(50.0));
    for (const auto& rec : r.records) CHECK(rec.rho[0] == doctest::Approx(rec.t).epsilon(1e-6));
}

TEST_CASE("two-soliton backward construction stays in the tube") {
    const auto p = small_plan();
    const auto r = run_construction(p);
    REQUIRE(r.ok());
    CHECK(r.records.size() == 21);
    for (std::size_t k = 1; k < r.records.size(); ++k) CHECK(r.records[k].t < r.records[k - 1].t);
    const auto& last = r.records.back();
    CHECK(last.rho[0] == doctest::Approx(40.0).epsilon(1e-3));
    CHECK(last.rho[1] == doctest::Approx(80.0).epsilon(1e-3));
    CHECK(last.local_mass.size() == 2);
    CHECK(r.verdicts.mass_drift < 1e-4);
    CHECK(r.verdicts.bootstrap < 1.0);
}

TEST_CASE("offset sensitivity runs every grid point") {
    auto p = small_plan();
    p.s_n = 60.0;
    const auto out = offset_sensitivity(p, {{0.0, 0.0}, {3.0, -3.0}});
    REQUIRE(out.size() == 2);
    for (const auto& o : out) {
        CHECK_FALSE(o.failure);
        CHECK_FALSE(o.exit_time);
    }
    CHECK(out[1].offsets[0] == 3.0);
}
