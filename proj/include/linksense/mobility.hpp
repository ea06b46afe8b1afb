#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "linksense/engine.hpp"
#include "linksense/radio.hpp"
#include "linksense/routing.hpp"
#include "linksense/types.hpp"

namespace linksense {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

struct StaticPos {
    Vec2 position;
};

/// Straight-line motion from `origin` at `velocity_mps`, starting at
/// start_time (position clamps to origin before then).
struct LinearMotion {
    Vec2 origin;
    Vec2 velocity_mps;
    SimTime start_time = 0.0;
};

using Trajectory = std::variant<StaticPos, LinearMotion>;

inline Vec2 position_at(const Trajectory& tr, SimTime t) {
    if (!(t >= 0.0)) throw std::domain_error("position_at: t must be >= 0");
    if (const auto* s = std::get_if<StaticPos>(&tr)) return s->position;
    const auto& m = std::get<LinearMotion>(tr);
    const double dt = std::max(0.0, t - m.start_time);
    return m.origin + m.velocity_mps * dt;
}

struct NodeSpec {
    NodeId id = 0;
    Trajectory trajectory;
    /// Node stops transmitting (Hello/TC/relay/data) at this time; it
    /// still receives. Used to model abrupt neighbor disappearance.
    std::optional<SimTime> tx_off_time;
};

struct TrafficSpec {
    NodeId source = 0;
    NodeId sink = 0;
    double packets_per_second = 2.0;
    std::uint32_t payload_bytes = 512;
    SimTime start_time = 5.0;
};

/// One fully specified simulation run, minus the adjacency algorithm
/// choice and seed (those vary per sweep cell).
struct Scenario {
    std::vector<NodeSpec> nodes;
    PropagationParams radio;
    TimingParams timing;
    TrafficSpec traffic;
    SimTime end_time = 0.0;
};

/// The chain experiment: n_static nodes on the x-axis at fixed spacing,
/// one mobile starting behind the first node and driving past the whole
/// chain, sending data back to node 0.
struct ChainScenarioParams {
    std::uint32_t n_static = 10;
    double spacing_m = 100.0;
    double mobile_start_offset_m = 10.0;
    double lateral_offset_m = 0.0;
    double speed_kmh = 60.0;
    double sim_padding_s = 10.0;
};

inline Scenario build_chain_scenario(const ChainScenarioParams& p, const PropagationParams& radio,
                                     const TimingParams& timing, const TrafficSpec& traffic_base) {
    if (p.n_static < 2) throw ConfigError("scenario.n_static", "must be >= 2");
    if (!(p.spacing_m > 0.0)) throw ConfigError("scenario.spacing_m", "must be > 0");
    if (!(p.speed_kmh > 0.0)) throw ConfigError("scenario.speed_kmh", "must be > 0");
    if (!(p.mobile_start_offset_m >= 0.0))
        throw ConfigError("scenario.mobile_start_offset_m", "must be >= 0");
    if (!(p.sim_padding_s >= 0.0)) throw ConfigError("scenario.sim_padding_s", "must be >= 0");
    if (!std::isfinite(p.lateral_offset_m))
        throw ConfigError("scenario.lateral_offset_m", "must be finite");

    Scenario s;
    s.radio = radio;
    s.timing = timing;
    for (std::uint32_t i = 0; i < p.n_static; ++i) {
        s.nodes.push_back({i, StaticPos{{i * p.spacing_m, 0.0}}, std::nullopt});
    }
    const NodeId mobile = p.n_static;
    const double speed_mps = kmh_to_mps(p.speed_kmh);
    s.nodes.push_back(
        {mobile,
         LinearMotion{{-p.mobile_start_offset_m, p.lateral_offset_m}, {speed_mps, 0.0}, 0.0},
         std::nullopt});

    // Run until the mobile reaches the last static node, plus padding to
    // observe the final link break.
    const double travel = p.spacing_m * (p.n_static - 1) + p.mobile_start_offset_m;
    s.end_time = travel / speed_mps + p.sim_padding_s;

    s.traffic = traffic_base;
    s.traffic.source = mobile;
    s.traffic.sink = 0;
    return s;
}

}  // namespace linksense
