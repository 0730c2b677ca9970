#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <map>
#include <set>

#include "dtnsim/batch.hpp"
#include "dtnsim/engine.hpp"
#include "dtnsim/protocols.hpp"

using namespace dtnsim;

namespace {

constexpr double kNinf = -std::numeric_limits<double>::infinity();

struct StubWorld final : WorldView {
    std::map<MsgId, Message> messages;
    std::set<std::pair<NodeId, MsgId>> holdings;
    std::map<std::pair<NodeId, NodeId>, double> utilities;

    const Message& message_of(MsgId m) const override { return messages.at(m); }
    bool holds_copy(NodeId n, MsgId m) const override { return holdings.count({n, m}) > 0; }
    double utility_of(NodeId n, NodeId d) const override {
        const auto it = utilities.find({n, d});
        return it == utilities.end() ? kNinf : it->second;
    }
};

struct Fixture {
    ConnectivityGraph graph;
    std::vector<std::uint8_t> failed;
    std::vector<MessageCopy> copies;
    StubWorld world;
    SplitMix64 rng{12345};

    explicit Fixture(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
        graph.adj.resize(n);
        for (auto [a, b] : edges) {
            graph.adj[a].push_back(b);
            graph.adj[b].push_back(a);
        }
        for (auto& v : graph.adj) std::sort(v.begin(), v.end());
        failed.assign(n, 0);
    }

    NodeView view(NodeId self, Slot slot = 0) {
        NodeView v;
        v.self = self;
        v.slot = slot;
        v.contention_on = false;   // decision logic under the ideal medium
        v.copies = &copies;
        v.neighbors = &graph.neighbors(self);
        v.graph = &graph;
        v.failed = &failed;
        v.world = &world;
        v.rng = &rng;
        return v;
    }

    MessageCopy& add_copy(MsgId msg, NodeId holder, std::uint32_t n, Phase phase) {
        MessageCopy c;
        c.msg_id = msg;
        c.holder = holder;
        c.n_copies = n;
        c.phase = phase;
        c.visited = {holder};
        c.chain = {holder};
        copies.push_back(std::move(c));
        world.holdings.insert({holder, msg});
        return copies.back();
    }
};

std::size_t count_sends(const ProtocolDecision& d) {
    std::size_t k = 0;
    for (const auto& a : d.actions)
        if (a.kind == ActionKind::HandOff || a.kind == ActionKind::Deliver) ++k;
    return k;
}

const Action* find_send(const ProtocolDecision& d) {
    for (const auto& a : d.actions)
        if (a.kind == ActionKind::HandOff || a.kind == ActionKind::Deliver) return &a;
    return nullptr;
}

} // namespace

TEST_CASE("direct transmission only ever targets the destination") {
    Fixture f(3, {{0, 1}, {0, 2}});
    f.world.messages[0] = Message{0, 0, 2, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Wait);

    const auto d = direct_transmission_step(f.view(0));
    REQUIRE(count_sends(d) == 1);
    REQUIRE(d.actions[0].kind == ActionKind::Deliver);
    REQUIRE(d.actions[0].to == 2);

    // destination out of range: hold, even with other neighbors around
    Fixture g(3, {{0, 1}});
    g.world.messages[0] = Message{0, 0, 2, 10, 0, 1};
    g.add_copy(0, 0, 1, Phase::Wait);
    REQUIRE(count_sends(direct_transmission_step(g.view(0))) == 0);
}

TEST_CASE("flooding replicates one fresh neighbor per slot") {
    Fixture f(5, {{0, 1}, {0, 2}, {0, 3}});
    f.world.messages[0] = Message{0, 0, 4, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Wait);

    const auto d = normal_flooding_step(f.view(0));
    REQUIRE(count_sends(d) == 1);
    const Action* a = find_send(d);
    REQUIRE(a->kind == ActionKind::HandOff);
    REQUIRE(a->replicate);
    REQUIRE(a->n_transfer == 1);
    REQUIRE((a->to == 1 || a->to == 2 || a->to == 3));
}

TEST_CASE("flooding suppresses neighbors that already hold the message") {
    Fixture f(4, {{0, 1}, {0, 2}});
    f.world.messages[0] = Message{0, 0, 3, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Wait);
    f.world.holdings.insert({1, 0});
    for (int i = 0; i < 32; ++i) {
        const auto d = normal_flooding_step(f.view(0));
        REQUIRE(count_sends(d) == 1);
        REQUIRE(find_send(d)->to == 2);
    }
    f.world.holdings.insert({2, 0});
    REQUIRE(count_sends(normal_flooding_step(f.view(0))) == 0);
}

TEST_CASE("spray and wait: source sheds single units and then waits") {
    Fixture f(5, {{0, 1}, {0, 2}, {0, 3}});
    f.world.messages[0] = Message{0, 0, 4, 10, 0, 4};
    f.add_copy(0, 0, 4, Phase::Spray);

    const auto d = spray_wait_step(f.view(0));
    REQUIRE(count_sends(d) == 1);
    const Action* a = find_send(d);
    REQUIRE(a->n_transfer == 1);
    REQUIRE_FALSE(a->replicate);
    REQUIRE(a->child_phase == Phase::Wait);

    // down to the last unit the copy flips to Wait and stops spraying
    f.copies[0].n_copies = 1;
    const auto d2 = spray_wait_step(f.view(0));
    REQUIRE(count_sends(d2) == 0);
    REQUIRE(d2.actions.size() == 1);
    REQUIRE(d2.actions[0].kind == ActionKind::SwitchPhase);
    REQUIRE(d2.actions[0].new_phase == Phase::Wait);
}

TEST_CASE("spray and wait with L=1 starts in Wait") {
    const Message m{0, 0, 4, 10, 0, 1};
    const MessageCopy c = initial_copy(ProtocolKind::SprayWait, m, 1);
    REQUIRE(c.phase == Phase::Wait);
    REQUIRE(c.n_copies == 1);
}

TEST_CASE("binary spray halves the budget, floor out, ceil kept") {
    Fixture f(4, {{0, 1}});
    f.world.messages[0] = Message{0, 0, 3, 10, 0, 4};
    f.add_copy(0, 0, 4, Phase::Spray);
    const auto d = binary_spray_wait_step(f.view(0));
    const Action* a = find_send(d);
    REQUIRE(a != nullptr);
    REQUIRE(a->n_transfer == 2);
    REQUIRE(a->child_phase == Phase::Spray);

    f.copies[0].n_copies = 3;
    const auto d3 = binary_spray_wait_step(f.view(0));
    const Action* b = find_send(d3);
    REQUIRE(b != nullptr);
    REQUIRE(b->n_transfer == 1);   // hand floor(3/2), keep 2: conservation 1+2=3
    REQUIRE(b->child_phase == Phase::Wait);
}

TEST_CASE("binary spray at one unit behaves like direct transmission") {
    Fixture f(4, {{0, 1}, {0, 3}});
    f.world.messages[0] = Message{0, 0, 3, 10, 0, 4};
    f.add_copy(0, 0, 1, Phase::Spray);
    const auto d = binary_spray_wait_step(f.view(0));
    const Action* a = find_send(d);
    REQUIRE(a != nullptr);
    REQUIRE(a->kind == ActionKind::Deliver);
    REQUIRE(a->to == 3);
}

TEST_CASE("seek mode hands off to any unvisited encounter") {
    Fixture f(4, {{0, 1}});
    f.world.messages[0] = Message{0, 0, 3, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Focus);
    const auto d = seek_focus_step(f.view(0));
    const Action* a = find_send(d);
    REQUIRE(a != nullptr);
    REQUIRE(a->kind == ActionKind::HandOff);
    REQUIRE(a->to == 1);
    REQUIRE(a->child_phase == Phase::Focus);
}

TEST_CASE("focus mode forwards only on strictly higher utility") {
    Fixture f(5, {{0, 1}, {0, 2}, {0, 3}});
    f.world.messages[0] = Message{0, 0, 4, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Focus);
    f.world.utilities[{0, 4}] = 10.0;
    f.world.utilities[{1, 4}] = 3.0;

    // nobody strictly better: hold
    REQUIRE(count_sends(seek_focus_step(f.view(0))) == 0);

    // best strictly-better neighbor wins
    f.world.utilities[{2, 4}] = 12.0;
    f.world.utilities[{3, 4}] = 15.0;
    const auto d = seek_focus_step(f.view(0));
    const Action* a = find_send(d);
    REQUIRE(a != nullptr);
    REQUIRE(a->to == 3);

    // equal utility is not enough
    f.world.utilities[{2, 4}] = 10.0;
    f.world.utilities[{3, 4}] = 10.0;
    REQUIRE(count_sends(seek_focus_step(f.view(0))) == 0);
}

TEST_CASE("scripted seek/focus schedule reproduces the hand trace") {
    // carrier 0 has never met 9: seeks to its only unvisited neighbor; the
    // next carrier has met 9 and only forwards uphill
    Fixture f(5, {{0, 1}, {1, 2}, {1, 3}});
    f.world.messages[0] = Message{0, 0, 4, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Focus);

    const auto d1 = seek_focus_step(f.view(0));
    const Action* hop1 = find_send(d1);
    REQUIRE(hop1 != nullptr);
    REQUIRE(hop1->to == 1);

    // move the copy by hand: now at 1, visited {0,1}
    f.copies[0].holder = 1;
    f.copies[0].visited = {0, 1};
    f.world.holdings = {{1, 0}};
    f.world.utilities[{1, 4}] = 6.0;
    f.world.utilities[{2, 4}] = 2.0;   // downhill
    f.world.utilities[{3, 4}] = 8.0;   // uphill
    const auto d2 = seek_focus_step(f.view(1));
    const Action* hop2 = find_send(d2);
    REQUIRE(hop2 != nullptr);
    REQUIRE(hop2->to == 3);

    // visited nodes are never revisited even when uphill
    f.copies[0].visited = {0, 1, 3};
    REQUIRE(count_sends(seek_focus_step(f.view(1))) == 0);
}

TEST_CASE("ssf spray hands one unit into Select") {
    Fixture f(5, {{0, 1}, {0, 2}, {0, 3}});
    f.world.messages[0] = Message{0, 0, 4, 10, 0, 3};
    f.add_copy(0, 0, 3, Phase::Spray);
    const auto d = ssf_step(f.view(0));
    const Action* a = find_send(d);
    REQUIRE(a != nullptr);
    REQUIRE(a->n_transfer == 1);
    REQUIRE(a->child_phase == Phase::Select);
    REQUIRE_FALSE(a->replicate);
}

TEST_CASE("ssf select plans a shortest route and walks it") {
    Fixture f(4, {{0, 1}, {1, 2}, {2, 3}});
    f.world.messages[0] = Message{0, 0, 3, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Select);
    const auto d = ssf_step(f.view(0));
    REQUIRE(d.actions.size() == 2);
    REQUIRE(d.actions[0].kind == ActionKind::SetRoute);
    REQUIRE(d.actions[0].route == std::vector<NodeId>{0, 1, 2, 3});
    REQUIRE(d.actions[1].kind == ActionKind::HandOff);
    REQUIRE(d.actions[1].to == 1);
    REQUIRE(d.actions[1].child_route == std::vector<NodeId>{1, 2, 3});
    REQUIRE(d.actions[1].child_phase == Phase::Select);
}

TEST_CASE("ssf select without any route falls to focus") {
    Fixture f(4, {{0, 1}});
    f.world.messages[0] = Message{0, 0, 3, 10, 0, 1};
    f.add_copy(0, 0, 1, Phase::Select);
    const auto d = ssf_step(f.view(0));
    REQUIRE(count_sends(d) == 0);
    REQUIRE(d.actions.size() == 1);
    REQUIRE(d.actions[0].kind == ActionKind::SwitchPhase);
    REQUIRE(d.actions[0].new_phase == Phase::Focus);
}

TEST_CASE("ssf select splices around a failed hop when a detour exists") {
    // plan 0-1-2, node 1 dies, detour via 3
    Fixture f(4, {{0, 1}, {1, 2}, {0, 3}, {3, 2}});
    f.world.messages[0] = Message{0, 0, 2, 10, 0, 1};
    MessageCopy& c = f.add_copy(0, 0, 1, Phase::Select);
    c.planned_route = {0, 1, 2};
    f.failed[1] = 1;
    f.graph.adj[0] = {3};
    f.graph.adj[1] = {};
    f.graph.adj[2] = {3};
    f.graph.adj[3] = {0, 2};

    const auto d = ssf_step(f.view(0));
    REQUIRE(d.actions.size() == 2);
    REQUIRE(d.actions[0].kind == ActionKind::SetRoute);
    REQUIRE(d.actions[0].route == std::vector<NodeId>{0, 3, 2});
    REQUIRE(d.actions[0].bypassed == 1);
    REQUIRE(d.actions[1].kind == ActionKind::HandOff);
    REQUIRE(d.actions[1].to == 3);
}

TEST_CASE("ssf select drops to focus when mobility broke the next edge") {
    Fixture f(3, {{1, 2}});
    f.world.messages[0] = Message{0, 0, 2, 10, 0, 1};
    MessageCopy& c = f.add_copy(0, 0, 1, Phase::Select);
    c.planned_route = {0, 1, 2};
    const auto d = ssf_step(f.view(0));
    REQUIRE(count_sends(d) == 0);
    REQUIRE(d.actions.size() == 1);
    REQUIRE(d.actions[0].kind == ActionKind::SwitchPhase);
    REQUIRE(d.actions[0].new_phase == Phase::Focus);
}

TEST_CASE("every protocol issues at most one send per slot") {
    for (ProtocolKind p : {ProtocolKind::Normal, ProtocolKind::DirectTx, ProtocolKind::SprayWait,
                           ProtocolKind::BinarySprayWait, ProtocolKind::SeekFocus,
                           ProtocolKind::SpraySelectFocus}) {
        Fixture f(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}});
        f.world.messages[0] = Message{0, 0, 5, 10, 0, 4};
        f.world.messages[1] = Message{1, 0, 4, 10, 0, 4};
        f.add_copy(0, 0, 4, Phase::Spray);
        f.add_copy(1, 0, 4, Phase::Spray);
        const auto d = protocol_step(p, f.view(0));
        REQUIRE(count_sends(d) <= 1);
    }
}

// --- engine-level traces -------------------------------------------------

namespace {

SimConfig static_line_config(std::uint32_t n, ProtocolKind p) {
    SimConfig c;
    c.num_nodes = n;
    c.area_w = 1000.0;
    c.area_h = 200.0;
    c.tx_range = 100.0;
    c.v_min = 0.0;
    c.v_max = 0.0;
    c.max_slots = 50;
    c.protocol = p;
    c.traffic = {TrafficSpec{0, n - 1, 0}};
    return c;
}

RunOptions line_positions(std::uint32_t n) {
    RunOptions opt;
    std::vector<Vec2> pos;
    for (std::uint32_t i = 0; i < n; ++i)
        pos.push_back({100.0 * static_cast<double>(i), 50.0});
    opt.preset_positions = pos;
    return opt;
}

} // namespace

TEST_CASE("flooding covers a static 5-node line at one hop per slot") {
    SimConfig c = static_line_config(5, ProtocolKind::Normal);
    c.contention_enabled = false;
    const RunResult r = run_simulation(c, line_positions(5));
    REQUIRE(r.reports[0].delivered);
    REQUIRE(r.reports[0].nodes_covered == 5);
    REQUIRE(r.reports[0].transmissions == 4);
    REQUIRE(r.reports[0].h_hops == 4);
    REQUIRE(r.reports[0].t_min_s == 4.0);
}

TEST_CASE("ssf delivers over a static 4-hop path in 4 sends") {
    SimConfig c = static_line_config(5, ProtocolKind::SpraySelectFocus);
    c.copy_budget = 1;
    const RunResult r = run_simulation(c, line_positions(5));
    REQUIRE(r.reports[0].delivered);
    REQUIRE(r.reports[0].transmissions == 4);
    REQUIRE(r.reports[0].h_hops == 4);
    // spray then select along the chain: 0>1 spray, 1>2 and 2>3 select walk,
    // 3>4 delivery
    int handoffs = 0;
    int deliveries = 0;
    for (const Event& e : r.log) {
        if (e.kind != EventKind::Transmission) continue;
        REQUIRE(e.outcome == Outcome::Delivered);
        if (e.payload == PayloadKind::CopyHandoff) ++handoffs;
        if (e.payload == PayloadKind::Delivery) ++deliveries;
    }
    REQUIRE(handoffs == 3);
    REQUIRE(deliveries == 1);
}

TEST_CASE("ssf never out-transmits flooding on a shared seed") {
    // zero failures, contention off: flooding replicates at every contact
    // while ssf caps itself at L plus the route walk
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::uint64_t tx_ssf = 0;
        std::uint64_t tx_normal = 0;
        for (ProtocolKind p : {ProtocolKind::SpraySelectFocus, ProtocolKind::Normal}) {
            SimConfig c = sweep_cell_config(25, 10, p, false, seed);
            c.contention_enabled = false;
            RunOptions opt;
            opt.keep_log = false;
            std::uint64_t total = 0;
            for (const auto& rep : run_simulation(c, opt).reports) total += rep.transmissions;
            (p == ProtocolKind::SpraySelectFocus ? tx_ssf : tx_normal) = total;
        }
        REQUIRE(tx_ssf <= tx_normal);
    }
}

TEST_CASE("every spray-family protocol conserves its budget") {
    for (ProtocolKind p : {ProtocolKind::SprayWait, ProtocolKind::BinarySprayWait,
                           ProtocolKind::SpraySelectFocus}) {
        SimConfig c = sweep_cell_config(20, 10, p, false, 11);
        c.copy_budget = 5;
        c.max_slots = 800;
        RunOptions opt;
        opt.keep_log = false;
        opt.on_slot_end = [](const SimState& s, const SimConfig& cfg) {
            for (MsgId m = 0; m < s.messages.size(); ++m) {
                if (!s.created[m]) continue;
                std::uint64_t units = s.delivered_units[m] + s.discarded_units[m];
                for (const auto& node : s.nodes)
                    for (const auto& copy : node.copies)
                        if (copy.msg_id == m) units += copy.n_copies;
                REQUIRE(units == cfg.copy_budget);
            }
        };
        run_simulation(c, opt);
    }
}

TEST_CASE("spray and wait distributes L-1 units then every copy waits") {
    SimConfig c;
    c.num_nodes = 5;
    c.area_w = 1200.0;
    c.area_h = 1200.0;
    c.tx_range = 100.0;
    c.v_min = 0.0;
    c.v_max = 0.0;
    c.max_slots = 8;
    c.copy_budget = 4;
    c.protocol = ProtocolKind::SprayWait;
    c.traffic = {TrafficSpec{0, 4, 0}};
    RunOptions opt;
    // star: relays in range of the source only; destination far away
    opt.preset_positions = std::vector<Vec2>{
        {500, 500}, {600, 500}, {400, 500}, {500, 600}, {1100, 1100}};

    std::vector<std::uint32_t> final_units;
    opt.on_slot_end = [&](const SimState& s, const SimConfig&) {
        std::uint64_t units = s.delivered_units[0] + s.discarded_units[0];
        for (const auto& node : s.nodes)
            for (const auto& copy : node.copies) units += copy.n_copies;
        if (s.created[0]) REQUIRE(units == 4);
    };
    const RunResult r = run_simulation(c, opt);
    REQUIRE_FALSE(r.reports[0].delivered);

    std::set<NodeId> receivers;
    int handoffs = 0;
    for (const Event& e : r.log) {
        if (e.kind == EventKind::Transmission && e.outcome == Outcome::Delivered) {
            REQUIRE(e.n == 1);
            receivers.insert(e.b);
            ++handoffs;
        }
    }
    REQUIRE(handoffs == 3);
    REQUIRE(receivers == std::set<NodeId>{1, 2, 3});
    bool source_waits = false;
    for (const Event& e : r.log) {
        if (e.kind == EventKind::PhaseSwitch && e.a == 0 && e.phase_to == Phase::Wait)
            source_waits = true;
    }
    REQUIRE(source_waits);
}
