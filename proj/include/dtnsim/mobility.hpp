#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/rng.hpp"

namespace dtnsim {

// Random-waypoint kinematics, zero pause time. Each node owns its stream so
// trajectories are independent of node count and of everything the protocol
// layer draws.
struct MobilityState {
    std::vector<Vec2> position;
    std::vector<Vec2> waypoint;
    std::vector<double> speed;
    std::vector<SplitMix64> stream;
};

inline MobilityState init_positions(const SimConfig& c) {
    MobilityState m;
    const std::size_t n = c.num_nodes;
    m.position.resize(n);
    m.waypoint.resize(n);
    m.speed.resize(n);
    m.stream.reserve(n);
    for (std::uint32_t i = 0; i < c.num_nodes; ++i) {
        m.stream.push_back(node_stream(c.seed, i, StreamKind::Mobility));
        auto& rng = m.stream.back();
        m.position[i] = {rng.uniform(0.0, c.area_w), rng.uniform(0.0, c.area_h)};
        m.waypoint[i] = {rng.uniform(0.0, c.area_w), rng.uniform(0.0, c.area_h)};
        m.speed[i] = rng.uniform(c.v_min, c.v_max);
    }
    return m;
}

// Advance every non-failed node by dt toward its waypoint; a node that
// reaches the waypoint stops there for the rest of the slot and draws a new
// leg. Displacement per call is therefore bounded by v_max * dt.
inline void step_mobility(MobilityState& m, const SimConfig& c, double dt,
                          std::span<const std::uint8_t> failed) {
    for (std::size_t i = 0; i < m.position.size(); ++i) {
        if (!failed.empty() && failed[i]) continue;
        Vec2& p = m.position[i];
        const Vec2& w = m.waypoint[i];
        const double dx = w.x - p.x;
        const double dy = w.y - p.y;
        const double remaining = std::sqrt(dx * dx + dy * dy);
        const double reach = m.speed[i] * dt;
        if (remaining <= reach) {
            p = w;
            auto& rng = m.stream[i];
            m.waypoint[i] = {rng.uniform(0.0, c.area_w), rng.uniform(0.0, c.area_h)};
            m.speed[i] = rng.uniform(c.v_min, c.v_max);
        } else {
            p.x += dx / remaining * reach;
            p.y += dy / remaining * reach;
        }
        // Waypoints are interior, so motion cannot leave the rectangle;
        // clamp anyway to keep the closed-area invariant exact under fp.
        p.x = std::clamp(p.x, 0.0, c.area_w);
        p.y = std::clamp(p.y, 0.0, c.area_h);
    }
}

} // namespace dtnsim
