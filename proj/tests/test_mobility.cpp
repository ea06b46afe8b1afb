#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "linksense/mobility.hpp"

using namespace linksense;
using Catch::Approx;

TEST_CASE("static trajectory is constant") {
    Trajectory tr = StaticPos{{5.0, 0.0}};
    for (double t : {0.0, 1.0, 100.0}) {
        auto pos = position_at(tr, t);
        REQUIRE(pos.x == 5.0);
        REQUIRE(pos.y == 0.0);
    }
}

TEST_CASE("linear trajectory advances at its velocity") {
    Trajectory tr = LinearMotion{{0.0, 0.0}, {5.556, 0.0}, 0.0};
    REQUIRE(position_at(tr, 10.0).x == Approx(55.56).margin(1e-9));

    Trajectory exact = LinearMotion{{0.0, 0.0}, {kmh_to_mps(20.0), 0.0}, 0.0};
    REQUIRE(position_at(exact, 10.0).x == Approx(200.0 / 3.6).margin(1e-9));
}

TEST_CASE("linear trajectory clamps before its start time") {
    Trajectory tr = LinearMotion{{1.0, 2.0}, {10.0, 0.0}, 2.0};
    REQUIRE(position_at(tr, 1.0).x == 1.0);
    REQUIRE(position_at(tr, 1.0).y == 2.0);
    REQUIRE(position_at(tr, 3.0).x == Approx(11.0));
}

TEST_CASE("negative time is rejected") {
    Trajectory tr = StaticPos{{0.0, 0.0}};
    REQUIRE_THROWS_AS(position_at(tr, -0.1), std::domain_error);
}

TEST_CASE("km/h converts to m/s by exactly 3.6") {
    REQUIRE(kmh_to_mps(20.0) == 20.0 / 3.6);
    REQUIRE(kmh_to_mps(100.0) == 100.0 / 3.6);
    REQUIRE(kmh_to_mps(3.6) == 1.0);
}

namespace {
Scenario default_chain(double speed_kmh, double padding = 10.0) {
    ChainScenarioParams p;
    p.speed_kmh = speed_kmh;
    p.sim_padding_s = padding;
    return build_chain_scenario(p, PropagationParams{}, TimingParams{}, TrafficSpec{});
}
}  // namespace

TEST_CASE("default chain places 10 statics 100 m apart and the mobile behind node 0") {
    Scenario s = default_chain(60.0);
    REQUIRE(s.nodes.size() == 11);
    for (std::uint32_t i = 0; i < 10; ++i) {
        auto pos = position_at(s.nodes[i].trajectory, 0.0);
        REQUIRE(pos.x == Approx(100.0 * i));
        REQUIRE(pos.y == 0.0);
    }
    auto mobile = position_at(s.nodes[10].trajectory, 0.0);
    REQUIRE(mobile.x == Approx(-10.0));
    REQUIRE(s.traffic.source == 10);
    REQUIRE(s.traffic.sink == 0);
}

TEST_CASE("chain end time covers the pass plus padding") {
    // (900 m + 10 m) / (100 km/h) + 10 s
    Scenario s = default_chain(100.0);
    REQUIRE(s.end_time == Approx(910.0 / kmh_to_mps(100.0) + 10.0).epsilon(1e-12));
    REQUIRE(s.end_time == Approx(42.76).margin(0.005));
}

TEST_CASE("small chain variant") {
    ChainScenarioParams p;
    p.n_static = 2;
    p.spacing_m = 50.0;
    p.speed_kmh = 20.0;
    Scenario s = build_chain_scenario(p, PropagationParams{}, TimingParams{}, TrafficSpec{});
    REQUIRE(s.nodes.size() == 3);
    REQUIRE(position_at(s.nodes[0].trajectory, 0.0).x == 0.0);
    REQUIRE(position_at(s.nodes[1].trajectory, 0.0).x == 50.0);
    REQUIRE(position_at(s.nodes[2].trajectory, 0.0).x == Approx(-10.0));
}

TEST_CASE("invalid chain parameters name the offending field") {
    ChainScenarioParams p;
    p.spacing_m = -5.0;
    try {
        build_chain_scenario(p, PropagationParams{}, TimingParams{}, TrafficSpec{});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.field() == "scenario.spacing_m");
    }

    ChainScenarioParams q;
    q.n_static = 1;
    REQUIRE_THROWS_AS(build_chain_scenario(q, PropagationParams{}, TimingParams{}, TrafficSpec{}),
                      ConfigError);
    ChainScenarioParams r;
    r.speed_kmh = 0.0;
    REQUIRE_THROWS_AS(build_chain_scenario(r, PropagationParams{}, TimingParams{}, TrafficSpec{}),
                      ConfigError);
}

TEST_CASE("mobile-to-static distance decreases then increases") {
    Scenario s = default_chain(60.0);
    const auto& mobile = s.nodes[10].trajectory;
    const auto& fixed = s.nodes[4].trajectory;  // node at x = 400
    double prev = distance(position_at(mobile, 0.0), position_at(fixed, 0.0));
    bool increasing = false;
    for (double t = 0.25; t <= s.end_time; t += 0.25) {
        double d = distance(position_at(mobile, t), position_at(fixed, t));
        if (d > prev + 1e-12) {
            increasing = true;
        } else {
            REQUIRE_FALSE(increasing);  // once receding, never approaches again
        }
        prev = d;
    }
    REQUIRE(increasing);
}
