#include <cmath>
#include <cstring>

#include "doctest.h"
#include "fkdv/errors.hpp"
#include "fkdv/evolution.hpp"
#include "fkdv/ground_state.hpp"
#include "fkdv/modulation.hpp"
#include "helpers.hpp"

using namespace fkdv;
using fkdv::test::max_abs_diff;

namespace {

EvolutionConfig config(double alpha, double dt, double t_end) {
    EvolutionConfig c;
    c.alpha = alpha;
    c.dt = dt;
    c.t_end = t_end;
    c.record_every = 100;
    return c;
}

}  // namespace

TEST_CASE("configuration is validated") {
    auto c = config(2.0, 1e-3, 1.0);
    CHECK_NOTHROW(c.validate());
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = config(2.0, 1e-3, 1.0);
    c.t_end = c.t_start;
    CHECK_THROWS_AS(c.validate(), Error);
    c = config(2.5, 1e-3, 1.0);
    CHECK_THROWS_AS(c.validate(), Error);
    c = config(2.0, 1e-3, 1.0);
    c.record_every = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("soliton translates at its speed") {
    const Grid g(1024, 100.0);
    const auto q = solve_ground_state(2.0, 1.0, g);
    const auto traj = evolve(q.profile, config(2.0, 1e-3, 5.0));
    REQUIRE(traj.ok());
    CHECK(traj.final_time == doctest::Approx(5.0));
    CHECK(max_abs_diff(traj.final_state, translate(q.profile, 5.0)) < 1e-7);
}

TEST_CASE("co-moving frame freezes the soliton") {
    const Grid g(2048, 200.0);
    const auto q = solve_ground_state(1.5, 1.2, g);
    auto cfg = config(1.5, 2e-3, 4.0);
    cfg.frame_speed = 1.2;
    const auto traj = evolve(q.profile, cfg);
    REQUIRE(traj.ok());
    CHECK(max_abs_diff(traj.final_state, q.profile) < 1e-7);
}

TEST_CASE("mass and energy are conserved") {
    const Grid g(2048, 200.0);
    const SolitonEnsemble ens(2.0, {1.0, 2.0}, g);
    const auto u0 = assemble_R(ens, {-30.0, 0.0});
    const auto traj = evolve(u0, config(2.0, 1e-3, 20.0));
    REQUIRE(traj.ok());
    const auto& first = traj.records.front();
    for (const auto& r : traj.records) {
        CHECK(std::abs(r.mass - first.mass) / first.mass < 1e-10);
        CHECK(std::abs(r.energy - first.energy) / std::abs(first.energy) < 1e-8);
    }
    CHECK(traj.records.size() == 201);
}

TEST_CASE("time reversal through the reflection") {
    const Grid g(1024, 100.0);
    const auto u0 = fkdv::test::gaussian(g, 0.0, 3.0, 0.5);
    const auto cfg = config(1.0, 1e-3, 3.0);
    const auto forward = evolve(u0, cfg);
    REQUIRE(forward.ok());
    const auto back = evolve(reflect_time(forward.final_state), cfg);
    REQUIRE(back.ok());
    CHECK(max_abs_diff(reflect_time(back.final_state), u0) < 1e-8);
}

TEST_CASE("observers see every record and can stop the run") {
    const Grid g(512, 100.0);
    const auto u0 = fkdv::test::gaussian(g, 0.0, 3.0, 0.5);
    std::size_t calls = 0;
    Observer count = [&](const SpectralField&, double t, DiagnosticsRecord& rec) {
        ++calls;
        rec.eta_l2 = t;
        if (t > 0.45) throw Error(ErrorKind::Instability, "stop", t);
    };
    const auto traj = evolve(u0, config(2.0, 1e-3, 1.0), {count});
    CHECK_FALSE(traj.ok());
    CHECK(traj.failure == ErrorKind::Instability);
    CHECK(calls == 6);
    // The record that raised is not kept.
    CHECK(traj.records.back().eta_l2 == doctest::Approx(0.4));
}

TEST_CASE("blow-up threshold aborts the run") {
    const Grid g(512, 100.0);
    const auto u0 = fkdv::test::gaussian(g, 0.0, 4.0, 2.0);
    auto cfg = config(2.0, 1e-3, 20.0);
    cfg.blowup = 2.5;
    const auto traj = evolve(u0, cfg);
    CHECK(traj.failure == ErrorKind::Instability);
    CHECK_FALSE(traj.records.empty());
}

TEST_CASE("non-finite data is rejected") {
    const Grid g(64, 10.0);
    std::vector<double> v(64, 0.0);
    v[3] = std::nan("");
    CHECK_THROWS_AS(evolve(SpectralField(g, v), config(2.0, 1e-3, 1.0)), Error);
}

TEST_CASE("runs are bitwise reproducible") {
    const Grid g(512, 100.0);
    const auto u0 = fkdv::test::gaussian(g, 0.0, 3.0, 0.7);
    const auto a = evolve(u0, config(1.5, 1e-3, 1.0));
    const auto b = evolve(u0, config(1.5, 1e-3, 1.0));
    REQUIRE(a.final_state.size() == b.final_state.size());
    CHECK(std::memcmp(a.final_state.samples().data(), b.final_state.samples().data(), sizeof(double) * 512) == 0);
}
