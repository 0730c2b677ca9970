#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dtnsim {

using NodeId = std::uint32_t;
using MsgId = std::uint32_t;
using Slot = std::int64_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist_sq(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Discrete simulation time: slot index plus the wall duration of one slot.
struct SimTime {
    Slot slot = 0;
    double slot_duration = 1.0;

    double seconds() const { return static_cast<double>(slot) * slot_duration; }
};

enum class Phase : std::uint8_t { Spray, Select, Focus, Wait };

inline const char* phase_name(Phase p) {
    switch (p) {
    case Phase::Spray: return "spray";
    case Phase::Select: return "select";
    case Phase::Focus: return "focus";
    case Phase::Wait: return "wait";
    }
    return "?";
}

enum class ProtocolKind : std::uint8_t {
    Normal,           // epidemic flooding
    DirectTx,
    SprayWait,
    BinarySprayWait,
    SeekFocus,
    SpraySelectFocus,
};

inline const char* protocol_name(ProtocolKind p) {
    switch (p) {
    case ProtocolKind::Normal: return "normal";
    case ProtocolKind::DirectTx: return "direct";
    case ProtocolKind::SprayWait: return "spray_wait";
    case ProtocolKind::BinarySprayWait: return "binary_sw";
    case ProtocolKind::SeekFocus: return "seek_focus";
    case ProtocolKind::SpraySelectFocus: return "ssf";
    }
    return "?";
}

inline std::optional<ProtocolKind> protocol_from_name(const std::string& s) {
    if (s == "normal") return ProtocolKind::Normal;
    if (s == "direct") return ProtocolKind::DirectTx;
    if (s == "spray_wait") return ProtocolKind::SprayWait;
    if (s == "binary_sw") return ProtocolKind::BinarySprayWait;
    if (s == "seek_focus") return ProtocolKind::SeekFocus;
    if (s == "ssf") return ProtocolKind::SpraySelectFocus;
    return std::nullopt;
}

struct Message {
    MsgId msg_id = 0;
    NodeId source = 0;
    NodeId destination = 0;
    std::uint32_t packet_size = 10;   // abstract units
    Slot created_at = 0;
    std::uint32_t copy_budget = 1;    // L
};

// One carrier's copy of a message. `visited` is the exclusion set (every
// node this copy's lineage has passed through, union-merged when two copies
// of the same message meet on one node); `chain` is the actual carrier
// sequence of the surviving lineage and is what delivery paths are built
// from.
struct MessageCopy {
    MsgId msg_id = 0;
    NodeId holder = 0;
    std::uint32_t n_copies = 1;
    Phase phase = Phase::Wait;
    std::vector<NodeId> visited;        // insertion-ordered, no duplicates
    std::vector<NodeId> chain;          // carrier history, source first
    std::vector<NodeId> planned_route;  // Select plan; front() == holder
    std::uint64_t uid = 0;

    bool has_visited(NodeId n) const {
        for (NodeId v : visited)
            if (v == n) return true;
        return false;
    }

    void add_visited(NodeId n) {
        if (!has_visited(n)) visited.push_back(n);
    }
};

struct FailureSpec {
    NodeId node = 0;
    Slot fail_slot = 0;
};

struct TrafficSpec {
    NodeId source = 0;
    NodeId destination = 0;
    Slot creation_slot = 0;
};

struct SimConfig {
    std::uint32_t num_nodes = 50;
    double area_w = 1000.0;            // meters
    double area_h = 1000.0;
    double tx_range = 200.0;           // meters, closed ball
    double slot_duration = 1.0;        // seconds
    Slot max_slots = 5000;
    double v_min = 5.0;                // meters/second
    double v_max = 15.0;
    std::uint32_t copy_budget = 4;     // L
    std::uint32_t packet_size = 10;
    ProtocolKind protocol = ProtocolKind::SpraySelectFocus;
    bool contention_enabled = true;
    std::vector<FailureSpec> failures;
    std::vector<TrafficSpec> traffic;
    std::uint64_t seed = 1;
};

// Returns every invariant violation with a readable reason; empty means the
// config is runnable.
inline std::vector<std::string> validate_config(const SimConfig& c) {
    std::vector<std::string> out;
    if (c.num_nodes == 0) out.push_back("num_nodes: must be positive");
    if (!(c.area_w > 0.0)) out.push_back("area_w: must be positive");
    if (!(c.area_h > 0.0)) out.push_back("area_h: must be positive");
    if (!(c.tx_range > 0.0)) out.push_back("tx_range: must be positive");
    if (!(c.slot_duration > 0.0)) out.push_back("slot_duration: must be positive");
    if (c.max_slots < 0) out.push_back("max_slots: must be non-negative");
    if (c.v_min < 0.0) out.push_back("v_min: must be non-negative");
    if (c.v_max < c.v_min) out.push_back("v_max: must be >= v_min");
    if (c.copy_budget == 0) out.push_back("copy_budget_L: must be >= 1");
    if (c.packet_size == 0) out.push_back("packet_size: must be positive");
    for (std::size_t i = 0; i < c.failures.size(); ++i) {
        if (c.failures[i].node >= c.num_nodes)
            out.push_back("failures[" + std::to_string(i) + "]: node id out of range");
        if (c.failures[i].fail_slot < 0)
            out.push_back("failures[" + std::to_string(i) + "]: fail slot must be non-negative");
    }
    for (std::size_t i = 0; i < c.traffic.size(); ++i) {
        const auto& t = c.traffic[i];
        if (t.source >= c.num_nodes)
            out.push_back("traffic[" + std::to_string(i) + "]: node id out of range");
        else if (t.destination >= c.num_nodes)
            out.push_back("traffic[" + std::to_string(i) + "]: node id out of range");
        else if (t.source == t.destination)
            out.push_back("traffic[" + std::to_string(i) + "]: source equals destination");
        if (t.creation_slot < 0)
            out.push_back("traffic[" + std::to_string(i) + "]: creation slot must be non-negative");
    }
    return out;
}

} // namespace dtnsim
