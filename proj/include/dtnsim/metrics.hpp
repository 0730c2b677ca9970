#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtnsim/core.hpp"

namespace dtnsim {

// Per-message delivery record of one run. Delivered-only fields stay empty
// when the message never reached its destination (censoring rule).
struct MetricsReport {
    MsgId msg_id = 0;
    bool created = false;
    bool delivered = false;
    std::uint64_t transmissions = 0;            // Delivered data events, beacons excluded
    std::uint32_t nodes_covered = 0;            // distinct nodes that ever held a copy
    std::optional<std::uint32_t> h_hops;        // delivery path hop count
    std::optional<double> h_distance_m;         // source-destination distance at creation
    std::optional<double> t_min_s;              // creation to first delivery
    std::optional<double> pd_paper;             // (PS / H) * T
    std::optional<double> delay_measured_s;     // measured counterpart of t_min_s
};

// TR: number of nodes covered. The raw transmission count lives in its own
// column for engineering analysis.
inline std::uint32_t transmission_rate(const MetricsReport& r) {
    return r.nodes_covered;
}

// PD = (PS / H) * T, read left to right; H is the delivery-path hop count.
inline double packet_delay(std::uint32_t packet_size, std::uint32_t hop_count, double t_seconds) {
    if (hop_count == 0) throw std::invalid_argument("packet_delay: hop count must be >= 1");
    return static_cast<double>(packet_size) / static_cast<double>(hop_count) * t_seconds;
}

// The source text uses H for two different quantities, so both are emitted
// under distinct names.
struct HopDistance {
    std::optional<std::uint32_t> hops;
    std::optional<double> distance_m;
};

inline HopDistance hop_distance(const MetricsReport& r) {
    return {r.h_hops, r.h_distance_m};
}

// One flattened (run, message) record; this is exactly one CSV row.
struct ResultRow {
    std::string protocol;
    std::uint32_t nodes = 0;
    std::uint32_t packet_size = 0;
    std::uint64_t seed = 0;
    MsgId msg_id = 0;
    bool delivered = false;
    std::uint64_t transmissions = 0;
    std::uint32_t nodes_covered = 0;
    std::optional<std::uint32_t> h_hops;
    std::optional<double> h_distance_m;
    std::optional<double> t_min_s;
    std::optional<double> pd_paper;
    std::optional<double> delay_measured_s;
};

struct StatTriple {
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    std::size_t count = 0;
};

inline std::optional<StatTriple> stat_triple(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    StatTriple s;
    s.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    const std::size_t n = values.size();
    s.median = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(n)));
    s.p95 = values[rank == 0 ? 0 : rank - 1];
    return s;
}

enum class GroupBy : std::uint8_t { Full, Nodes, PacketSize };

struct SummaryRow {
    std::string protocol;
    std::optional<std::uint32_t> nodes;
    std::optional<std::uint32_t> packet_size;
    std::size_t rows = 0;
    std::size_t delivered = 0;
    double delivery_ratio = 0.0;
    std::optional<StatTriple> transmissions;
    std::optional<StatTriple> nodes_covered;
    std::optional<StatTriple> h_hops;
    std::optional<StatTriple> h_distance_m;
    std::optional<StatTriple> t_min_s;
    std::optional<StatTriple> pd_paper;
    std::optional<StatTriple> delay_measured_s;
};

// Aggregates rows per (protocol, nodes, packet_size), optionally collapsing
// one of the numeric keys. Output order is the sorted group key, so the
// result is independent of input permutation.
inline std::vector<SummaryRow> aggregate(std::span<const ResultRow> rows,
                                         GroupBy by = GroupBy::Full) {
    struct Key {
        std::string protocol;
        std::optional<std::uint32_t> nodes;
        std::optional<std::uint32_t> packet_size;
        bool operator<(const Key& o) const {
            if (protocol != o.protocol) return protocol < o.protocol;
            if (nodes != o.nodes) return nodes < o.nodes;
            return packet_size < o.packet_size;
        }
        bool operator==(const Key& o) const {
            return protocol == o.protocol && nodes == o.nodes && packet_size == o.packet_size;
        }
    };

    std::vector<std::pair<Key, const ResultRow*>> tagged;
    tagged.reserve(rows.size());
    for (const auto& r : rows) {
        Key k;
        k.protocol = r.protocol;
        if (by != GroupBy::PacketSize) k.nodes = r.nodes;
        if (by != GroupBy::Nodes) k.packet_size = r.packet_size;
        tagged.emplace_back(std::move(k), &r);
    }
    std::stable_sort(tagged.begin(), tagged.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<SummaryRow> out;
    std::size_t i = 0;
    while (i < tagged.size()) {
        std::size_t j = i;
        while (j < tagged.size() && tagged[j].first == tagged[i].first) ++j;

        SummaryRow s;
        s.protocol = tagged[i].first.protocol;
        s.nodes = tagged[i].first.nodes;
        s.packet_size = tagged[i].first.packet_size;
        s.rows = j - i;

        std::vector<double> tx, cov, hops, dist, tmin, pd, delay;
        for (std::size_t k = i; k < j; ++k) {
            const ResultRow& r = *tagged[k].second;
            if (r.delivered) ++s.delivered;
            tx.push_back(static_cast<double>(r.transmissions));
            cov.push_back(static_cast<double>(r.nodes_covered));
            if (r.h_hops) hops.push_back(static_cast<double>(*r.h_hops));
            if (r.h_distance_m) dist.push_back(*r.h_distance_m);
            if (r.t_min_s) tmin.push_back(*r.t_min_s);
            if (r.pd_paper) pd.push_back(*r.pd_paper);
            if (r.delay_measured_s) delay.push_back(*r.delay_measured_s);
        }
        s.delivery_ratio = static_cast<double>(s.delivered) / static_cast<double>(s.rows);
        s.transmissions = stat_triple(std::move(tx));
        s.nodes_covered = stat_triple(std::move(cov));
        s.h_hops = stat_triple(std::move(hops));
        s.h_distance_m = stat_triple(std::move(dist));
        s.t_min_s = stat_triple(std::move(tmin));
        s.pd_paper = stat_triple(std::move(pd));
        s.delay_measured_s = stat_triple(std::move(delay));
        out.push_back(std::move(s));
        i = j;
    }
    return out;
}

} // namespace dtnsim
