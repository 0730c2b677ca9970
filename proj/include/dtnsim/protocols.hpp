#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/medium.hpp"
#include "dtnsim/route.hpp"
#include "dtnsim/rng.hpp"

namespace dtnsim {

// What a protocol may ask the node to do in one slot. At most one HandOff
// or Deliver per node per slot (the medium's one-send rule); SetRoute and
// SwitchPhase are local bookkeeping and free.
enum class ActionKind : std::uint8_t { HandOff, Deliver, SwitchPhase, SetRoute };

struct Action {
    static constexpr NodeId kNoNode = static_cast<NodeId>(-1);

    ActionKind kind = ActionKind::SwitchPhase;
    MsgId msg_id = 0;
    NodeId to = 0;                      // receiver (HandOff/Deliver)
    std::uint32_t n_transfer = 0;       // copy units moved
    bool replicate = false;             // flooding: sender keeps its copy
    Phase child_phase = Phase::Wait;    // phase of the transferred copy
    std::vector<NodeId> child_route;    // Select plan handed to the receiver
    Phase new_phase = Phase::Wait;      // SwitchPhase target
    std::vector<NodeId> route;          // SetRoute payload; front() == holder
    NodeId bypassed = kNoNode;          // SetRoute came from bypass recovery
};

struct ProtocolDecision {
    std::vector<Action> actions;
};

// Read-only world oracles the engine (or a test fixture) provides to the
// protocol step functions. Copy holdings stand in for summary-vector
// exchange; utilities stand in for the values beacons advertise.
class WorldView {
public:
    virtual ~WorldView() = default;
    virtual const Message& message_of(MsgId msg_id) const = 0;
    virtual bool holds_copy(NodeId node, MsgId msg_id) const = 0;
    virtual double utility_of(NodeId node, NodeId destination) const = 0;
};

struct NodeView {
    NodeId self = 0;
    Slot slot = 0;
    bool contention_on = true;
    const std::vector<MessageCopy>* copies = nullptr;    // sorted by msg_id
    const std::vector<NodeId>* neighbors = nullptr;      // alive, in range, sorted
    const ConnectivityGraph* graph = nullptr;
    const std::vector<std::uint8_t>* failed = nullptr;
    const WorldView* world = nullptr;
    SplitMix64* rng = nullptr;
};

namespace detail {

inline bool is_neighbor(const NodeView& v, NodeId n) {
    const auto& nb = *v.neighbors;
    return std::binary_search(nb.begin(), nb.end(), n);
}

// Delivery has priority in every protocol: if any held message's
// destination is in range, deliver that copy (lowest msg_id first).
inline bool emit_delivery(const NodeView& v, ProtocolDecision& d) {
    for (const MessageCopy& c : *v.copies) {
        const Message& m = v.world->message_of(c.msg_id);
        if (is_neighbor(v, m.destination)) {
            Action a;
            a.kind = ActionKind::Deliver;
            a.msg_id = c.msg_id;
            a.to = m.destination;
            a.n_transfer = c.n_copies;
            d.actions.push_back(std::move(a));
            return true;
        }
    }
    return false;
}

inline Action make_handoff(MsgId msg, NodeId to, std::uint32_t n, Phase child, bool replicate) {
    Action a;
    a.kind = ActionKind::HandOff;
    a.msg_id = msg;
    a.to = to;
    a.n_transfer = n;
    a.replicate = replicate;
    a.child_phase = child;
    return a;
}

// Neighbors that do not yet hold a copy of msg and are not on the copy's
// visited list.
inline std::vector<NodeId> fresh_relays(const NodeView& v, const MessageCopy& c) {
    std::vector<NodeId> out;
    for (NodeId nb : *v.neighbors) {
        if (v.world->holds_copy(nb, c.msg_id)) continue;
        if (c.has_visited(nb)) continue;
        out.push_back(nb);
    }
    return out;
}

// Best strictly-better Focus candidate among unvisited neighbors, or -1.
// Ties go to the lowest id; the strict inequality keeps handoff utility
// increasing along any carrier chain.
inline NodeId best_focus_candidate(const NodeView& v, const MessageCopy& c, NodeId destination) {
    const double u_self = v.world->utility_of(v.self, destination);
    double best = u_self;
    NodeId who = static_cast<NodeId>(-1);
    for (NodeId nb : *v.neighbors) {
        if (c.has_visited(nb)) continue;
        const double u = v.world->utility_of(nb, destination);
        if (u > best) {
            best = u;
            who = nb;
        }
    }
    return who;
}

} // namespace detail

// Epidemic flooding ("normal routing"): replicate every held message to
// every neighbor that lacks it, one transmission per slot. The destination
// is simply one more neighbor without the message, and the (msg, target)
// pair is drawn uniformly; the random choice keeps holders that share a
// receiver from colliding forever on the same deterministic pick. Under
// contention, holders transmit with probability 1/2 per slot (slotted-ALOHA
// persistence): without it, two adjacent holders both send every slot and
// the half-duplex rule deafens the pair permanently.
inline ProtocolDecision normal_flooding_step(const NodeView& v) {
    ProtocolDecision d;
    if (v.contention_on && !v.copies->empty() && v.rng->next_double() < 0.5) return d;
    std::vector<std::pair<MsgId, NodeId>> candidates;
    for (const MessageCopy& c : *v.copies) {
        for (NodeId nb : *v.neighbors) {
            if (!v.world->holds_copy(nb, c.msg_id)) candidates.emplace_back(c.msg_id, nb);
        }
    }
    if (!candidates.empty()) {
        const auto& pick = candidates[v.rng->next_below(candidates.size())];
        const Message& m = v.world->message_of(pick.first);
        if (pick.second == m.destination) {
            Action a;
            a.kind = ActionKind::Deliver;
            a.msg_id = pick.first;
            a.to = pick.second;
            for (const MessageCopy& c : *v.copies)
                if (c.msg_id == pick.first) a.n_transfer = c.n_copies;
            d.actions.push_back(std::move(a));
        } else {
            d.actions.push_back(
                detail::make_handoff(pick.first, pick.second, 1, Phase::Wait, true));
        }
    }
    return d;
}

// Forward only to the destination itself.
inline ProtocolDecision direct_transmission_step(const NodeView& v) {
    ProtocolDecision d;
    detail::emit_delivery(v, d);
    return d;
}

// Source spray and wait: the source hands single copy units to fresh relays
// until it is down to one unit, then everyone does direct transmission.
inline ProtocolDecision spray_wait_step(const NodeView& v) {
    ProtocolDecision d;
    for (const MessageCopy& c : *v.copies) {
        if (c.phase == Phase::Spray && c.n_copies == 1) {
            Action a;
            a.kind = ActionKind::SwitchPhase;
            a.msg_id = c.msg_id;
            a.new_phase = Phase::Wait;
            d.actions.push_back(std::move(a));
        }
    }
    if (detail::emit_delivery(v, d)) return d;
    for (const MessageCopy& c : *v.copies) {
        if (c.phase != Phase::Spray || c.n_copies <= 1) continue;
        auto relays = detail::fresh_relays(v, c);
        if (relays.empty()) continue;
        const NodeId to = relays[v.rng->next_below(relays.size())];
        d.actions.push_back(detail::make_handoff(c.msg_id, to, 1, Phase::Wait, false));
        break;
    }
    return d;
}

// Binary spray and wait: a holder with n > 1 units meeting a node with no
// copy hands floor(n/2) and keeps ceil(n/2); at n == 1 it waits.
inline ProtocolDecision binary_spray_wait_step(const NodeView& v) {
    ProtocolDecision d;
    for (const MessageCopy& c : *v.copies) {
        if (c.phase == Phase::Spray && c.n_copies == 1) {
            Action a;
            a.kind = ActionKind::SwitchPhase;
            a.msg_id = c.msg_id;
            a.new_phase = Phase::Wait;
            d.actions.push_back(std::move(a));
        }
    }
    if (detail::emit_delivery(v, d)) return d;
    for (const MessageCopy& c : *v.copies) {
        if (c.phase != Phase::Spray || c.n_copies <= 1) continue;
        auto relays = detail::fresh_relays(v, c);
        if (relays.empty()) continue;
        const NodeId to = relays[v.rng->next_below(relays.size())];
        const std::uint32_t half = c.n_copies / 2;
        d.actions.push_back(detail::make_handoff(
            c.msg_id, to, half, half > 1 ? Phase::Spray : Phase::Wait, false));
        break;
    }
    return d;
}

// Seek and focus, single copy. While the carrier has never met the
// destination it seeks: hand off to a random unvisited encounter. Once it
// has met the destination it focuses: forward only on strictly higher
// utility.
inline ProtocolDecision seek_focus_step(const NodeView& v) {
    ProtocolDecision d;
    if (detail::emit_delivery(v, d)) return d;
    for (const MessageCopy& c : *v.copies) {
        const Message& m = v.world->message_of(c.msg_id);
        const double u_self = v.world->utility_of(v.self, m.destination);
        if (u_self == -std::numeric_limits<double>::infinity()) {
            std::vector<NodeId> open;
            for (NodeId nb : *v.neighbors)
                if (!c.has_visited(nb)) open.push_back(nb);
            if (open.empty()) continue;
            const NodeId to = open[v.rng->next_below(open.size())];
            d.actions.push_back(detail::make_handoff(c.msg_id, to, c.n_copies, Phase::Focus, false));
        } else {
            const NodeId to = detail::best_focus_candidate(v, c, m.destination);
            if (to == static_cast<NodeId>(-1)) continue;
            d.actions.push_back(detail::make_handoff(c.msg_id, to, c.n_copies, Phase::Focus, false));
        }
        break;
    }
    return d;
}

// Spray Select Focus.
//   Spray: the source distributes its L units, one per fresh relay; each
//   handed copy enters Select.
//   Select: compute a minimum-hop route over the current snapshot (excluding
//   visited carriers) and walk it hop by hop while the plan holds. A failed
//   node on the remaining route triggers bypass recovery; an unrecoverable
//   plan (no route, no bypass, or the next edge gone through mobility) drops
//   the copy to Focus.
//   Focus: utility-gated forwarding to unvisited neighbors.
inline ProtocolDecision ssf_step(const NodeView& v) {
    ProtocolDecision d;
    if (detail::emit_delivery(v, d)) return d;

    for (const MessageCopy& c : *v.copies) {
        const Message& m = v.world->message_of(c.msg_id);
        switch (c.phase) {
        case Phase::Spray: {
            auto relays = detail::fresh_relays(v, c);
            if (relays.empty()) continue;
            const NodeId to = relays[v.rng->next_below(relays.size())];
            d.actions.push_back(detail::make_handoff(c.msg_id, to, 1, Phase::Select, false));
            return d;
        }
        case Phase::Select: {
            std::vector<NodeId> route = c.planned_route;
            bool fresh_plan = false;
            if (route.empty()) {
                auto r = shortest_hop_route(*v.graph, v.self, m.destination, c.visited, v.slot);
                if (!r || r->hops.size() < 2) {
                    Action a;
                    a.kind = ActionKind::SwitchPhase;
                    a.msg_id = c.msg_id;
                    a.new_phase = Phase::Focus;
                    d.actions.push_back(std::move(a));
                    continue;
                }
                route = std::move(r->hops);
                fresh_plan = true;
            }

            // Dead end anywhere on the remaining plan: splice around it.
            NodeId dead = static_cast<NodeId>(-1);
            for (std::size_t i = 1; i < route.size(); ++i) {
                if ((*v.failed)[route[i]]) {
                    dead = route[i];
                    break;
                }
            }
            NodeId bypassed = Action::kNoNode;
            if (dead != static_cast<NodeId>(-1)) {
                auto bp = bypass_recovery(Route{route, v.slot}, dead, *v.graph, c.visited, v.slot);
                if (!bp) {
                    Action a;
                    a.kind = ActionKind::SwitchPhase;
                    a.msg_id = c.msg_id;
                    a.new_phase = Phase::Focus;
                    d.actions.push_back(std::move(a));
                    continue;
                }
                route = std::move(bp->hops);
                fresh_plan = true;
                bypassed = dead;
            }

            const NodeId next = route[1];
            if (c.has_visited(next)) {
                // Plan invalidated by a copy merge; try once more from here.
                auto r = shortest_hop_route(*v.graph, v.self, m.destination, c.visited, v.slot);
                if (!r || r->hops.size() < 2) {
                    Action a;
                    a.kind = ActionKind::SwitchPhase;
                    a.msg_id = c.msg_id;
                    a.new_phase = Phase::Focus;
                    d.actions.push_back(std::move(a));
                    continue;
                }
                route = std::move(r->hops);
                fresh_plan = true;
            }

            if (!v.graph->edge(v.self, route[1])) {
                // Mobility broke the plan; Select does not re-discover.
                Action a;
                a.kind = ActionKind::SwitchPhase;
                a.msg_id = c.msg_id;
                a.new_phase = Phase::Focus;
                d.actions.push_back(std::move(a));
                continue;
            }

            if (fresh_plan) {
                Action sr;
                sr.kind = ActionKind::SetRoute;
                sr.msg_id = c.msg_id;
                sr.route = route;
                sr.bypassed = bypassed;
                d.actions.push_back(std::move(sr));
            }
            Action h = detail::make_handoff(c.msg_id, route[1], c.n_copies, Phase::Select, false);
            h.child_route.assign(route.begin() + 1, route.end());
            d.actions.push_back(std::move(h));
            return d;
        }
        case Phase::Focus: {
            const NodeId to = detail::best_focus_candidate(v, c, m.destination);
            if (to == static_cast<NodeId>(-1)) continue;
            d.actions.push_back(detail::make_handoff(c.msg_id, to, c.n_copies, Phase::Focus, false));
            return d;
        }
        case Phase::Wait:
            continue;
        }
    }
    return d;
}

inline ProtocolDecision protocol_step(ProtocolKind p, const NodeView& v) {
    switch (p) {
    case ProtocolKind::Normal: return normal_flooding_step(v);
    case ProtocolKind::DirectTx: return direct_transmission_step(v);
    case ProtocolKind::SprayWait: return spray_wait_step(v);
    case ProtocolKind::BinarySprayWait: return binary_spray_wait_step(v);
    case ProtocolKind::SeekFocus: return seek_focus_step(v);
    case ProtocolKind::SpraySelectFocus: return ssf_step(v);
    }
    return {};
}

// The copy a freshly created message starts with at its source. Single-copy
// protocols ignore the configured budget.
inline MessageCopy initial_copy(ProtocolKind p, const Message& m, std::uint64_t uid) {
    MessageCopy c;
    c.msg_id = m.msg_id;
    c.holder = m.source;
    c.uid = uid;
    c.visited = {m.source};
    c.chain = {m.source};
    switch (p) {
    case ProtocolKind::Normal:
    case ProtocolKind::DirectTx:
        c.n_copies = 1;
        c.phase = Phase::Wait;
        break;
    case ProtocolKind::SeekFocus:
        c.n_copies = 1;
        c.phase = Phase::Focus;
        break;
    case ProtocolKind::SprayWait:
    case ProtocolKind::BinarySprayWait:
        c.n_copies = m.copy_budget;
        c.phase = m.copy_budget > 1 ? Phase::Spray : Phase::Wait;
        break;
    case ProtocolKind::SpraySelectFocus:
        c.n_copies = m.copy_budget;
        c.phase = Phase::Spray;
        break;
    }
    return c;
}

} // namespace dtnsim
