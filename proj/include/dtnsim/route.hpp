#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/medium.hpp"

namespace dtnsim {

struct Route {
    std::vector<NodeId> hops;   // holder first, destination last
    Slot computed_at = 0;
};

// Minimum-hop path src -> dst on the snapshot, avoiding `excluded` (src
// itself is always allowed as the origin). BFS with sorted adjacency and
// first-discoverer parents, which yields the lexicographically smallest
// shortest path; that tie-break is part of the determinism contract.
inline std::optional<Route> shortest_hop_route(const ConnectivityGraph& graph, NodeId src,
                                               NodeId dst, std::span<const NodeId> excluded,
                                               Slot computed_at = 0) {
    if (src == dst) return Route{{src}, computed_at};
    const std::size_t n = graph.size();
    if (src >= n || dst >= n) return std::nullopt;

    std::vector<std::uint8_t> blocked(n, 0);
    for (NodeId e : excluded)
        if (e < n) blocked[e] = 1;
    blocked[src] = 0;

    std::vector<NodeId> parent(n, src);
    std::vector<std::uint8_t> seen(n, 0);
    seen[src] = 1;
    std::vector<NodeId> queue;
    queue.reserve(n);
    queue.push_back(src);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (NodeId v : graph.neighbors(u)) {
            if (seen[v] || blocked[v]) continue;
            seen[v] = 1;
            parent[v] = u;
            if (v == dst) {
                Route r;
                r.computed_at = computed_at;
                for (NodeId w = dst;; w = parent[w]) {
                    r.hops.push_back(w);
                    if (w == src) break;
                }
                std::reverse(r.hops.begin(), r.hops.end());
                return r;
            }
            queue.push_back(v);
        }
    }
    return std::nullopt;
}

// Dead-end splice: keep the prefix strictly before the failed hop, then
// recompute a shortest suffix from the last good hop, excluding the failed
// node and everything already used. None means the caller falls back to
// the Focus phase.
inline std::optional<Route> bypass_recovery(const Route& route, NodeId failed_node,
                                            const ConnectivityGraph& graph,
                                            std::span<const NodeId> excluded,
                                            Slot computed_at = 0) {
    std::size_t cut = route.hops.size();
    for (std::size_t i = 0; i < route.hops.size(); ++i) {
        if (route.hops[i] == failed_node) {
            cut = i;
            break;
        }
    }
    if (cut == route.hops.size() || cut == 0) return std::nullopt;

    const NodeId last_good = route.hops[cut - 1];
    const NodeId dst = route.hops.back();

    std::vector<NodeId> avoid(excluded.begin(), excluded.end());
    avoid.push_back(failed_node);
    for (std::size_t i = 0; i < cut; ++i) avoid.push_back(route.hops[i]);

    auto suffix = shortest_hop_route(graph, last_good, dst, avoid, computed_at);
    if (!suffix) return std::nullopt;

    Route spliced;
    spliced.computed_at = computed_at;
    spliced.hops.assign(route.hops.begin(), route.hops.begin() + static_cast<long>(cut - 1));
    spliced.hops.insert(spliced.hops.end(), suffix->hops.begin(), suffix->hops.end());
    return spliced;
}

} // namespace dtnsim
