#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dtnsim/core.hpp"

namespace dtnsim {

// Per-node last-encounter timers, fed by the beacon exchange every slot.
// Absent (never met) is the minimal utility.
struct EncounterTimerTable {
    static constexpr Slot kNever = -1;
    std::vector<Slot> last_encounter;   // indexed by NodeId

    explicit EncounterTimerTable(std::size_t num_nodes = 0)
        : last_encounter(num_nodes, kNever) {}

    Slot get(NodeId peer) const { return last_encounter[peer]; }
};

inline void record_encounter(EncounterTimerTable& table_a, EncounterTimerTable& table_b,
                             NodeId a, NodeId b, Slot slot) {
    table_a.last_encounter[b] = slot;
    table_b.last_encounter[a] = slot;
}

// U_X(Y): most recent meeting wins. Monotone in recency; -inf when X has
// never met Y.
inline double utility(const EncounterTimerTable& table, NodeId destination, Slot /*current_slot*/) {
    const Slot s = table.last_encounter[destination];
    if (s == EncounterTimerTable::kNever) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(s);
}

// Forward iff the candidate carrier is strictly better.
inline bool focus_decision(double u_carrier, double u_candidate) {
    return u_candidate > u_carrier;
}

} // namespace dtnsim
