#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/medium.hpp"
#include "dtnsim/metrics.hpp"
#include "dtnsim/mobility.hpp"
#include "dtnsim/protocols.hpp"
#include "dtnsim/rng.hpp"
#include "dtnsim/utility.hpp"

namespace dtnsim {

enum class EventKind : std::uint8_t {
    MessageCreated,
    Transmission,
    PhaseSwitch,
    NodeFailed,
    CopyStuck,
    CopyDiscarded,
    CopyMerged,
    BypassUsed,
    DeliveryRecorded,
};

// Append-only run journal. Transmission entries carry the sending copy's
// phase and, for Focus handoffs, both carriers' utilities for the
// destination at handoff time.
struct Event {
    EventKind kind = EventKind::Transmission;
    Slot slot = 0;
    MsgId msg = 0;
    NodeId a = 0;                       // sender / affected node
    NodeId b = 0;                       // receiver / peer / failed hop
    PayloadKind payload = PayloadKind::CopyHandoff;
    Outcome outcome = Outcome::Deferred;
    std::uint32_t n = 0;                // copy units involved
    Phase phase_from = Phase::Wait;
    Phase phase_to = Phase::Wait;
    std::uint64_t uid = 0;              // sending copy's lineage
    std::uint64_t uid_child = 0;        // lineage continuing at the receiver
    double u_from = 0.0;
    double u_to = 0.0;
};

struct DeliveryRecord {
    Slot delivery_slot = 0;             // transmission slot + 1 (a send occupies its slot)
    std::vector<NodeId> path;           // carrier chain plus destination
};

struct PerNodeState {
    std::vector<MessageCopy> copies;    // sorted by msg_id
    EncounterTimerTable timers;
    std::vector<std::uint8_t> knows_delivered;   // per msg, receipt gossip
};

struct SimState {
    Slot slot = 0;                      // next slot to process
    MobilityState mob;
    std::vector<std::uint8_t> failed;
    std::vector<PerNodeState> nodes;
    std::vector<Message> messages;      // msg_id == index into traffic
    std::vector<std::uint8_t> created;
    std::vector<std::optional<DeliveryRecord>> registry;   // write-once
    std::vector<std::uint64_t> delivered_units;
    std::vector<std::uint64_t> discarded_units;
    std::vector<std::vector<std::uint8_t>> covered;        // [msg][node]
    std::vector<std::uint32_t> covered_count;
    std::vector<std::uint64_t> tx_count;                   // Delivered data events
    std::vector<double> h_distance_at_creation;
    std::vector<SplitMix64> proto_stream;
    std::vector<Event> log;
    bool keep_log = true;
    std::uint64_t next_uid = 1;
    std::uint32_t delivered_messages = 0;

    std::size_t num_nodes() const { return nodes.size(); }
};

struct RunOptions {
    bool keep_log = true;
    // Test surface: pin the initial placement (waypoints start equal to the
    // positions, so v_min = v_max = 0 gives a static topology).
    std::optional<std::vector<Vec2>> preset_positions;
    std::function<void(const SimState&, const SimConfig&)> on_slot_end;
};

struct RunResult {
    SimConfig config;
    std::uint64_t seed = 0;
    Slot slots_run = 0;
    std::vector<MetricsReport> reports;
    std::vector<Event> log;
};

namespace detail {

class EngineWorld final : public WorldView {
public:
    EngineWorld(const SimState& s, Slot slot) : s_(s), slot_(slot) {}

    const Message& message_of(MsgId msg_id) const override { return s_.messages[msg_id]; }

    bool holds_copy(NodeId node, MsgId msg_id) const override {
        return find_copy(s_.nodes[node].copies, msg_id) != nullptr;
    }

    double utility_of(NodeId node, NodeId destination) const override {
        return utility(s_.nodes[node].timers, destination, slot_);
    }

    static const MessageCopy* find_copy(const std::vector<MessageCopy>& copies, MsgId msg_id) {
        auto it = std::lower_bound(copies.begin(), copies.end(), msg_id,
                                   [](const MessageCopy& c, MsgId m) { return c.msg_id < m; });
        if (it == copies.end() || it->msg_id != msg_id) return nullptr;
        return &*it;
    }

    static MessageCopy* find_copy(std::vector<MessageCopy>& copies, MsgId msg_id) {
        auto it = std::lower_bound(copies.begin(), copies.end(), msg_id,
                                   [](const MessageCopy& c, MsgId m) { return c.msg_id < m; });
        if (it == copies.end() || it->msg_id != msg_id) return nullptr;
        return &*it;
    }

private:
    const SimState& s_;
    Slot slot_;
};

inline void insert_copy_sorted(std::vector<MessageCopy>& copies, MessageCopy&& c) {
    auto it = std::lower_bound(copies.begin(), copies.end(), c.msg_id,
                               [](const MessageCopy& e, MsgId m) { return e.msg_id < m; });
    copies.insert(it, std::move(c));
}

inline void erase_copy(std::vector<MessageCopy>& copies, MsgId msg_id) {
    auto it = std::lower_bound(copies.begin(), copies.end(), msg_id,
                               [](const MessageCopy& e, MsgId m) { return e.msg_id < m; });
    if (it != copies.end() && it->msg_id == msg_id) copies.erase(it);
}

inline void mark_covered(SimState& s, MsgId msg, NodeId node) {
    if (!s.covered[msg][node]) {
        s.covered[msg][node] = 1;
        ++s.covered_count[msg];
    }
}

} // namespace detail

inline SimState make_state(const SimConfig& config, const RunOptions& options = {}) {
    SimState s;
    s.keep_log = options.keep_log;
    s.mob = init_positions(config);
    if (options.preset_positions) {
        if (options.preset_positions->size() != config.num_nodes)
            throw std::invalid_argument("preset_positions: wrong node count");
        s.mob.position = *options.preset_positions;
        s.mob.waypoint = *options.preset_positions;
    }
    s.failed.assign(config.num_nodes, 0);
    s.nodes.resize(config.num_nodes);
    const std::size_t msgs = config.traffic.size();
    for (std::uint32_t i = 0; i < config.num_nodes; ++i) {
        s.nodes[i].timers = EncounterTimerTable(config.num_nodes);
        s.nodes[i].knows_delivered.assign(msgs, 0);
        s.proto_stream.push_back(node_stream(config.seed, i, StreamKind::Protocol));
    }
    s.messages.resize(msgs);
    for (std::uint32_t m = 0; m < msgs; ++m) {
        const TrafficSpec& t = config.traffic[m];
        s.messages[m] = Message{m, t.source, t.destination, config.packet_size,
                                t.creation_slot, config.copy_budget};
    }
    s.created.assign(msgs, 0);
    s.registry.assign(msgs, std::nullopt);
    s.delivered_units.assign(msgs, 0);
    s.discarded_units.assign(msgs, 0);
    s.covered.assign(msgs, std::vector<std::uint8_t>(config.num_nodes, 0));
    s.covered_count.assign(msgs, 0);
    s.tx_count.assign(msgs, 0);
    s.h_distance_at_creation.assign(msgs, 0.0);
    return s;
}

// One slot, fixed sub-step order: failures -> mobility -> graph -> beacons
// and receipt gossip -> message creation -> protocol decisions (NodeId
// order) -> arbitration -> application -> log.
inline void step(SimState& s, const SimConfig& config) {
    const Slot slot = s.slot;

    // failures
    for (NodeId n : apply_failures(s.failed, config.failures, slot)) {
        if (s.keep_log) {
            Event e;
            e.kind = EventKind::NodeFailed;
            e.slot = slot;
            e.a = n;
            s.log.push_back(e);
            for (const MessageCopy& c : s.nodes[n].copies) {
                Event st;
                st.kind = EventKind::CopyStuck;
                st.slot = slot;
                st.msg = c.msg_id;
                st.a = n;
                st.n = c.n_copies;
                st.uid = c.uid;
                s.log.push_back(st);
            }
        }
    }

    // mobility
    step_mobility(s.mob, config, config.slot_duration, s.failed);

    // connectivity snapshot
    const ConnectivityGraph graph = build_graph(s.mob.position, config.tx_range, s.failed);

    // beacons: encounter timers plus 1-bit delivery-receipt gossip. Gossip
    // uses the pre-slot knowledge snapshot (no same-slot transitivity).
    const std::size_t msgs = s.messages.size();
    std::vector<std::uint8_t> gain;
    if (msgs > 0) gain.assign(s.num_nodes() * msgs, 0);
    for (NodeId a = 0; a < s.num_nodes(); ++a) {
        for (NodeId b : graph.neighbors(a)) {
            if (b < a) continue;
            record_encounter(s.nodes[a].timers, s.nodes[b].timers, a, b, slot);
            for (std::size_t m = 0; m < msgs; ++m) {
                if (s.nodes[b].knows_delivered[m]) gain[a * msgs + m] = 1;
                if (s.nodes[a].knows_delivered[m]) gain[b * msgs + m] = 1;
            }
        }
    }
    for (NodeId n = 0; n < s.num_nodes(); ++n) {
        if (s.failed[n]) continue;
        for (std::size_t m = 0; m < msgs; ++m) {
            if (!gain.empty() && gain[n * msgs + m]) s.nodes[n].knows_delivered[m] = 1;
        }
        auto& copies = s.nodes[n].copies;
        for (std::size_t i = 0; i < copies.size();) {
            if (s.nodes[n].knows_delivered[copies[i].msg_id]) {
                s.discarded_units[copies[i].msg_id] += copies[i].n_copies;
                if (s.keep_log) {
                    Event e;
                    e.kind = EventKind::CopyDiscarded;
                    e.slot = slot;
                    e.msg = copies[i].msg_id;
                    e.a = n;
                    e.n = copies[i].n_copies;
                    e.uid = copies[i].uid;
                    s.log.push_back(e);
                }
                copies.erase(copies.begin() + static_cast<long>(i));
            } else {
                ++i;
            }
        }
    }

    // message creation
    for (std::uint32_t m = 0; m < msgs; ++m) {
        if (s.created[m] || s.messages[m].created_at != slot) continue;
        s.created[m] = 1;
        const Message& msg = s.messages[m];
        s.h_distance_at_creation[m] =
            std::sqrt(dist_sq(s.mob.position[msg.source], s.mob.position[msg.destination]));
        MessageCopy c = initial_copy(config.protocol, msg, s.next_uid++);
        detail::insert_copy_sorted(s.nodes[msg.source].copies, std::move(c));
        detail::mark_covered(s, m, msg.source);
        if (s.keep_log) {
            Event e;
            e.kind = EventKind::MessageCreated;
            e.slot = slot;
            e.msg = m;
            e.a = msg.source;
            e.b = msg.destination;
            s.log.push_back(e);
        }
    }

    // protocol decisions, NodeId order; local actions apply immediately,
    // sends go to arbitration. Local actions only touch the deciding node's
    // own copies, which no other node's view reads.
    const detail::EngineWorld world(s, slot);
    struct PendingSend {
        NodeId sender;
        Action action;
    };
    std::vector<PendingSend> sends;
    std::vector<TransmissionRequest> requests;
    for (NodeId n = 0; n < s.num_nodes(); ++n) {
        if (s.failed[n] || s.nodes[n].copies.empty()) continue;
        NodeView view;
        view.self = n;
        view.slot = slot;
        view.contention_on = config.contention_enabled;
        view.copies = &s.nodes[n].copies;
        view.neighbors = &graph.neighbors(n);
        view.graph = &graph;
        view.failed = &s.failed;
        view.world = &world;
        view.rng = &s.proto_stream[n];
        ProtocolDecision d = protocol_step(config.protocol, view);
        for (Action& a : d.actions) {
            switch (a.kind) {
            case ActionKind::SwitchPhase: {
                MessageCopy* c = detail::EngineWorld::find_copy(s.nodes[n].copies, a.msg_id);
                if (!c) break;
                if (s.keep_log) {
                    Event e;
                    e.kind = EventKind::PhaseSwitch;
                    e.slot = slot;
                    e.msg = a.msg_id;
                    e.a = n;
                    e.phase_from = c->phase;
                    e.phase_to = a.new_phase;
                    e.uid = c->uid;
                    s.log.push_back(e);
                }
                c->phase = a.new_phase;
                c->planned_route.clear();
                break;
            }
            case ActionKind::SetRoute: {
                MessageCopy* c = detail::EngineWorld::find_copy(s.nodes[n].copies, a.msg_id);
                if (!c) break;
                c->planned_route = a.route;
                if (a.bypassed != Action::kNoNode && s.keep_log) {
                    Event e;
                    e.kind = EventKind::BypassUsed;
                    e.slot = slot;
                    e.msg = a.msg_id;
                    e.a = n;
                    e.b = a.bypassed;
                    e.uid = c->uid;
                    s.log.push_back(e);
                }
                break;
            }
            case ActionKind::HandOff:
            case ActionKind::Deliver: {
                TransmissionRequest r;
                r.sender = n;
                r.receiver = a.to;
                r.msg_id = a.msg_id;
                r.kind = a.kind == ActionKind::Deliver ? PayloadKind::Delivery
                                                       : PayloadKind::CopyHandoff;
                requests.push_back(r);
                sends.push_back({n, std::move(a)});
                break;
            }
            }
        }
    }

    // contention arbitration
    const std::vector<TransmissionEvent> events =
        arbitrate(requests, graph, config.contention_enabled, slot);

    // apply: extract everything first, then insert, so same-slot transfers
    // cannot observe each other's effects
    struct Inbound {
        NodeId to;
        MessageCopy child;
        bool delivery;
        NodeId sender;
        std::size_t event_index;
    };
    std::vector<Inbound> inbound;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const TransmissionEvent& ev = events[i];
        const Action& act = sends[i].action;
        MessageCopy* src = detail::EngineWorld::find_copy(s.nodes[ev.request.sender].copies,
                                                          ev.request.msg_id);
        assert(src != nullptr);

        Event e;
        e.kind = EventKind::Transmission;
        e.slot = slot;
        e.msg = ev.request.msg_id;
        e.a = ev.request.sender;
        e.b = ev.request.receiver;
        e.payload = ev.request.kind;
        e.outcome = ev.outcome;
        e.n = act.n_transfer;
        e.phase_from = src->phase;
        e.uid = src->uid;
        if (src->phase == Phase::Focus && ev.request.kind == PayloadKind::CopyHandoff) {
            const NodeId dest = s.messages[ev.request.msg_id].destination;
            e.u_from = utility(s.nodes[ev.request.sender].timers, dest, slot);
            e.u_to = utility(s.nodes[ev.request.receiver].timers, dest, slot);
        }

        if (ev.outcome != Outcome::Delivered) {
            if (s.keep_log) s.log.push_back(e);
            continue;
        }

        ++s.tx_count[ev.request.msg_id];

        Inbound in;
        in.to = ev.request.receiver;
        in.delivery = ev.request.kind == PayloadKind::Delivery;
        in.sender = ev.request.sender;
        in.event_index = i;

        MessageCopy child;
        child.msg_id = src->msg_id;
        child.holder = in.to;
        child.n_copies = act.n_transfer;
        child.phase = act.child_phase;
        child.visited = src->visited;
        child.chain = src->chain;
        child.chain.push_back(in.to);
        child.planned_route = act.child_route;
        const bool full_move = !act.replicate && act.n_transfer >= src->n_copies;
        child.uid = full_move ? src->uid : s.next_uid++;
        if (!child.has_visited(in.to)) child.visited.push_back(in.to);
        e.uid_child = child.uid;
        if (s.keep_log) s.log.push_back(e);

        if (!act.replicate) {
            if (act.n_transfer >= src->n_copies) {
                detail::erase_copy(s.nodes[ev.request.sender].copies, ev.request.msg_id);
            } else {
                src->n_copies -= act.n_transfer;
            }
        }
        in.child = std::move(child);
        inbound.push_back(std::move(in));
    }

    for (Inbound& in : inbound) {
        const MsgId m = in.child.msg_id;
        if (in.delivery) {
            s.delivered_units[m] += in.child.n_copies;
            detail::mark_covered(s, m, in.to);
            s.nodes[in.sender].knows_delivered[m] = 1;
            s.nodes[in.to].knows_delivered[m] = 1;
            if (!s.registry[m]) {
                DeliveryRecord rec;
                rec.delivery_slot = slot + 1;
                rec.path = in.child.chain;   // chain already ends at the destination
                s.registry[m] = std::move(rec);
                ++s.delivered_messages;
                if (s.keep_log) {
                    Event e;
                    e.kind = EventKind::DeliveryRecorded;
                    e.slot = slot;
                    e.msg = m;
                    e.a = in.sender;
                    e.b = in.to;
                    s.log.push_back(e);
                }
            }
            continue;
        }
        detail::mark_covered(s, m, in.to);
        MessageCopy* existing = detail::EngineWorld::find_copy(s.nodes[in.to].copies, m);
        if (existing) {
            existing->n_copies += in.child.n_copies;
            for (NodeId v : in.child.visited) existing->add_visited(v);
            if (s.keep_log) {
                Event e;
                e.kind = EventKind::CopyMerged;
                e.slot = slot;
                e.msg = m;
                e.a = in.to;
                e.n = in.child.n_copies;
                e.uid = in.child.uid;
                s.log.push_back(e);
            }
        } else {
            detail::insert_copy_sorted(s.nodes[in.to].copies, std::move(in.child));
        }
    }

    ++s.slot;
}

inline RunResult run_simulation(const SimConfig& config, const RunOptions& options = {}) {
    {
        const auto violations = validate_config(config);
        if (!violations.empty()) {
            std::string what = "invalid config";
            for (const auto& v : violations) what += "; " + v;
            throw std::invalid_argument(what);
        }
    }
    SimState s = make_state(config, options);
    while (s.slot < config.max_slots &&
           s.delivered_messages < static_cast<std::uint32_t>(s.messages.size())) {
        step(s, config);
        if (options.on_slot_end) options.on_slot_end(s, config);
    }

    RunResult out;
    out.config = config;
    out.seed = config.seed;
    out.slots_run = s.slot;
    out.reports.reserve(s.messages.size());
    for (std::uint32_t m = 0; m < s.messages.size(); ++m) {
        MetricsReport r;
        r.msg_id = m;
        r.created = s.created[m] != 0;
        r.transmissions = s.tx_count[m];
        r.nodes_covered = s.covered_count[m];
        if (r.created) r.h_distance_m = s.h_distance_at_creation[m];
        if (s.registry[m]) {
            const DeliveryRecord& rec = *s.registry[m];
            r.delivered = true;
            r.h_hops = static_cast<std::uint32_t>(rec.path.size() - 1);
            const double t =
                static_cast<double>(rec.delivery_slot - s.messages[m].created_at) *
                config.slot_duration;
            r.t_min_s = t;
            r.delay_measured_s = t;
            r.pd_paper = packet_delay(config.packet_size, *r.h_hops, t);
        }
        out.reports.push_back(std::move(r));
    }
    out.log = std::move(s.log);
    return out;
}

// Store-carry-forward feasibility oracle: can any scheme move the message
// from source to destination within the horizon? A transmission occupies
// its slot, so the reachable set grows by at most one graph layer per slot.
// Trajectories and failures evolve exactly as in the engine.
inline bool spacetime_reachable(const SimConfig& config, const TrafficSpec& msg,
                                const RunOptions& options = {}) {
    MobilityState mob = init_positions(config);
    if (options.preset_positions) {
        mob.position = *options.preset_positions;
        mob.waypoint = *options.preset_positions;
    }
    std::vector<std::uint8_t> failed(config.num_nodes, 0);
    std::vector<std::uint8_t> reached(config.num_nodes, 0);
    for (Slot slot = 0; slot < config.max_slots; ++slot) {
        apply_failures(failed, config.failures, slot);
        step_mobility(mob, config, config.slot_duration, failed);
        if (slot < msg.creation_slot) continue;
        if (slot == msg.creation_slot) reached[msg.source] = 1;
        const ConnectivityGraph graph = build_graph(mob.position, config.tx_range, failed);
        std::vector<NodeId> frontier;
        for (NodeId n = 0; n < config.num_nodes; ++n) {
            if (!reached[n] || failed[n]) continue;
            for (NodeId nb : graph.neighbors(n)) {
                if (!reached[nb]) frontier.push_back(nb);
            }
        }
        for (NodeId n : frontier) reached[n] = 1;
        if (reached[msg.destination]) return true;
    }
    return false;
}

} // namespace dtnsim
