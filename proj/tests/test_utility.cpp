#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <map>

#include "dtnsim/rng.hpp"
#include "dtnsim/utility.hpp"

using namespace dtnsim;

TEST_CASE("encounters stamp both tables and overwrite with the latest") {
    EncounterTimerTable a(4);
    EncounterTimerTable b(4);
    record_encounter(a, b, 0, 1, 5);
    REQUIRE(a.get(1) == 5);
    REQUIRE(b.get(0) == 5);
    record_encounter(a, b, 0, 1, 9);
    REQUIRE(a.get(1) == 9);
    REQUIRE(b.get(0) == 9);
}

TEST_CASE("three mutually-in-range nodes update all six directed entries") {
    std::vector<EncounterTimerTable> t(3, EncounterTimerTable(3));
    record_encounter(t[0], t[1], 0, 1, 4);
    record_encounter(t[0], t[2], 0, 2, 4);
    record_encounter(t[1], t[2], 1, 2, 4);
    for (NodeId x = 0; x < 3; ++x)
        for (NodeId y = 0; y < 3; ++y)
            if (x != y) REQUIRE(t[x].get(y) == 4);
}

TEST_CASE("never-met is minimal utility and recency orders utilities") {
    EncounterTimerTable t(3);
    REQUIRE(utility(t, 1, 100) == -std::numeric_limits<double>::infinity());
    t.last_encounter[1] = 10;
    t.last_encounter[2] = 40;
    REQUIRE(utility(t, 2, 100) > utility(t, 1, 100));
    REQUIRE(utility(t, 1, 100) > -std::numeric_limits<double>::infinity());
}

TEST_CASE("focus decision is a strict comparison") {
    REQUIRE(focus_decision(3.0, 5.0));
    REQUIRE_FALSE(focus_decision(5.0, 5.0));
    const double ninf = -std::numeric_limits<double>::infinity();
    REQUIRE_FALSE(focus_decision(ninf, ninf));
    REQUIRE(focus_decision(ninf, 0.0));
}

TEST_CASE("focus decision is irreflexive and asymmetric") {
    SplitMix64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const double a = rng.next_double() < 0.1 ? -std::numeric_limits<double>::infinity()
                                                 : rng.uniform(0, 50);
        const double b = rng.next_double() < 0.1 ? -std::numeric_limits<double>::infinity()
                                                 : rng.uniform(0, 50);
        REQUIRE_FALSE(focus_decision(a, a));
        REQUIRE_FALSE((focus_decision(a, b) && focus_decision(b, a)));
    }
}

TEST_CASE("tables replay a scripted encounter trace") {
    constexpr std::size_t n = 6;
    std::vector<EncounterTimerTable> tables(n, EncounterTimerTable(n));
    std::map<std::pair<NodeId, NodeId>, Slot> last;   // directed oracle

    SplitMix64 rng(314);
    for (Slot slot = 0; slot < 50; ++slot) {
        const int meetings = static_cast<int>(rng.next_below(3));
        for (int k = 0; k < meetings; ++k) {
            const NodeId a = static_cast<NodeId>(rng.next_below(n));
            NodeId b = static_cast<NodeId>(rng.next_below(n));
            if (a == b) continue;
            record_encounter(tables[a], tables[b], a, b, slot);
            last[{a, b}] = slot;
            last[{b, a}] = slot;
        }
    }
    for (NodeId x = 0; x < n; ++x) {
        for (NodeId y = 0; y < n; ++y) {
            if (x == y) continue;
            const auto it = last.find({x, y});
            if (it == last.end()) {
                REQUIRE(tables[x].get(y) == EncounterTimerTable::kNever);
            } else {
                REQUIRE(tables[x].get(y) == it->second);
            }
        }
    }
}
