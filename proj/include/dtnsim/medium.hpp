#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "dtnsim/core.hpp"

namespace dtnsim {

// Instantaneous connectivity: symmetric, no self loops, failed nodes
// isolated. Edge rule is the closed ball dist(a,b) <= tx_range.
struct ConnectivityGraph {
    std::vector<std::vector<NodeId>> adj;   // sorted ascending

    std::size_t size() const { return adj.size(); }

    bool edge(NodeId a, NodeId b) const {
        if (a >= adj.size() || a == b) return false;
        const auto& v = adj[a];
        return std::binary_search(v.begin(), v.end(), b);
    }

    const std::vector<NodeId>& neighbors(NodeId a) const { return adj[a]; }
};

inline ConnectivityGraph build_graph(std::span<const Vec2> positions, double tx_range,
                                     std::span<const std::uint8_t> failed) {
    ConnectivityGraph g;
    const std::size_t n = positions.size();
    g.adj.resize(n);
    const double r2 = tx_range * tx_range;
    for (std::size_t a = 0; a < n; ++a) {
        if (!failed.empty() && failed[a]) continue;
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!failed.empty() && failed[b]) continue;
            if (dist_sq(positions[a], positions[b]) <= r2) {
                g.adj[a].push_back(static_cast<NodeId>(b));
                g.adj[b].push_back(static_cast<NodeId>(a));
            }
        }
    }
    return g;
}

enum class PayloadKind : std::uint8_t { CopyHandoff, Delivery, Beacon };

struct TransmissionRequest {
    NodeId sender = 0;
    NodeId receiver = 0;
    MsgId msg_id = 0;
    PayloadKind kind = PayloadKind::CopyHandoff;
};

enum class Outcome : std::uint8_t { Delivered, Collided, Deferred };

struct TransmissionEvent {
    TransmissionRequest request;
    Outcome outcome = Outcome::Deferred;
    Slot slot = 0;
};

// Slot arbitration. With contention disabled every request whose edge still
// exists is delivered (the idealized medium). With contention enabled the
// rules apply in order:
//   (a) one send per sender per slot; excess requests from one sender are
//       Deferred, keeping the lowest (msg_id, receiver) pair,
//   (b) half-duplex: a sending node is deaf, its inbound requests are
//       Deferred,
//   (c) receiver-side collision: two or more surviving senders targeting
//       the same receiver collide; all of them become Collided.
// Deferred and Collided requests are simply retried by the protocols on the
// next slot, since decisions are recomputed from state.
inline std::vector<TransmissionEvent> arbitrate(const std::vector<TransmissionRequest>& requests,
                                                const ConnectivityGraph& graph,
                                                bool contention_enabled, Slot slot) {
    std::vector<TransmissionEvent> events(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
        events[i].request = requests[i];
        events[i].slot = slot;
        events[i].outcome = Outcome::Deferred;
    }

    // A request whose edge vanished this slot never makes it onto the air.
    std::vector<std::size_t> live;
    live.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (graph.edge(requests[i].sender, requests[i].receiver)) live.push_back(i);
    }

    if (!contention_enabled) {
        for (std::size_t i : live) events[i].outcome = Outcome::Delivered;
        return events;
    }

    // (a) keep one candidate per sender
    const std::size_t n = graph.size();
    std::vector<std::size_t> candidate(n, static_cast<std::size_t>(-1));
    for (std::size_t i : live) {
        const auto& r = requests[i];
        std::size_t& cur = candidate[r.sender];
        if (cur == static_cast<std::size_t>(-1)) {
            cur = i;
            continue;
        }
        const auto& c = requests[cur];
        if (r.msg_id < c.msg_id || (r.msg_id == c.msg_id && r.receiver < c.receiver)) cur = i;
    }

    std::vector<std::uint8_t> is_sender(n, 0);
    for (std::size_t s = 0; s < n; ++s)
        if (candidate[s] != static_cast<std::size_t>(-1)) is_sender[s] = 1;

    // (b) drop candidates aimed at a deaf (sending) node, (c) group the rest
    // by receiver and collide groups of two or more.
    std::vector<std::vector<std::size_t>> inbound(n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t i = candidate[s];
        if (i == static_cast<std::size_t>(-1)) continue;
        if (is_sender[requests[i].receiver]) continue;   // stays Deferred
        inbound[requests[i].receiver].push_back(i);
    }
    for (const auto& group : inbound) {
        if (group.size() == 1) {
            events[group[0]].outcome = Outcome::Delivered;
        } else {
            for (std::size_t i : group) events[i].outcome = Outcome::Collided;
        }
    }
    return events;
}

// Permanent dead-end injection: every scheduled failure at or before `slot`
// is in force. Returns the ids failing exactly now so the engine can mark
// their copies stuck.
inline std::vector<NodeId> apply_failures(std::vector<std::uint8_t>& failed,
                                          std::span<const FailureSpec> schedule, Slot slot) {
    std::vector<NodeId> newly;
    for (const auto& f : schedule) {
        if (f.fail_slot <= slot && !failed[f.node]) {
            failed[f.node] = 1;
            newly.push_back(f.node);
        }
    }
    return newly;
}

} // namespace dtnsim
