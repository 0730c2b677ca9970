#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "dtnsim/engine.hpp"
#include "dtnsim/metrics.hpp"
#include "dtnsim/rng.hpp"

using namespace dtnsim;

TEST_CASE("packet delay follows the left-to-right formula") {
    REQUIRE(packet_delay(10, 5, 2.0) == 4.0);
    REQUIRE(packet_delay(5, 1, 1.0) == 5.0);
    REQUIRE_THROWS_AS(packet_delay(10, 0, 1.0), std::invalid_argument);
}

TEST_CASE("packet delay is linear in packet size at fixed hops and time") {
    const double base = packet_delay(5, 3, 7.0);
    for (std::uint32_t ps : {5u, 10u, 15u, 20u, 25u}) {
        REQUIRE(packet_delay(ps, 3, 7.0) == Catch::Approx(base * ps / 5.0));
    }
}

TEST_CASE("transmission rate counts covered nodes, success or not") {
    MetricsReport r;
    r.nodes_covered = 7;
    r.delivered = false;
    REQUIRE(transmission_rate(r) == 7);
}

TEST_CASE("a 3-4-5 placement reports distance 50 and both hop quantities") {
    SimConfig c;
    c.num_nodes = 2;
    c.area_w = 100.0;
    c.area_h = 100.0;
    c.tx_range = 50.0;
    c.v_min = 0.0;
    c.v_max = 0.0;
    c.max_slots = 5;
    c.protocol = ProtocolKind::DirectTx;
    c.packet_size = 10;
    c.traffic = {TrafficSpec{0, 1, 0}};
    RunOptions opt;
    opt.preset_positions = std::vector<Vec2>{{0, 0}, {30, 40}};
    const RunResult run = run_simulation(c, opt);
    const MetricsReport& r = run.reports[0];
    REQUIRE(r.delivered);
    REQUIRE(r.h_distance_m == 50.0);
    const HopDistance hd = hop_distance(r);
    REQUIRE(hd.hops == 1);
    REQUIRE(hd.distance_m == 50.0);
    REQUIRE(transmission_rate(r) == 2);
    // PD recomputable from the emitted columns
    REQUIRE(r.pd_paper == packet_delay(c.packet_size, *r.h_hops, *r.t_min_s));
}

namespace {

ResultRow make_row(const std::string& proto, std::uint32_t nodes, std::uint32_t ps,
                   std::uint64_t seed, bool delivered, double tx, double hops) {
    ResultRow r;
    r.protocol = proto;
    r.nodes = nodes;
    r.packet_size = ps;
    r.seed = seed;
    r.msg_id = 0;
    r.delivered = delivered;
    r.transmissions = static_cast<std::uint64_t>(tx);
    r.nodes_covered = static_cast<std::uint32_t>(tx) + 1;
    if (delivered) {
        r.h_hops = static_cast<std::uint32_t>(hops);
        r.t_min_s = hops * 3.0;
        r.pd_paper = 10.0 / hops * (hops * 3.0);
        r.delay_measured_s = hops * 3.0;
        r.h_distance_m = 100.0 + hops;
    }
    return r;
}

} // namespace

TEST_CASE("singleton aggregation echoes the run") {
    const std::vector<ResultRow> rows = {make_row("ssf", 50, 10, 1, true, 12, 3)};
    const auto summary = aggregate(rows);
    REQUIRE(summary.size() == 1);
    REQUIRE(summary[0].rows == 1);
    REQUIRE(summary[0].delivery_ratio == 1.0);
    REQUIRE(summary[0].transmissions->mean == 12.0);
    REQUIRE(summary[0].transmissions->median == 12.0);
    REQUIRE(summary[0].transmissions->p95 == 12.0);
    REQUIRE(summary[0].h_hops->mean == 3.0);
}

TEST_CASE("duplicated runs do not move mean or median") {
    const ResultRow r = make_row("ssf", 50, 10, 1, true, 12, 3);
    const auto one = aggregate(std::vector<ResultRow>{r});
    const auto two = aggregate(std::vector<ResultRow>{r, r});
    REQUIRE(one[0].transmissions->mean == two[0].transmissions->mean);
    REQUIRE(one[0].transmissions->median == two[0].transmissions->median);
    REQUIRE(two[0].rows == 2);
}

TEST_CASE("aggregation is permutation invariant and mean sits inside the range") {
    SplitMix64 rng(555);
    std::vector<ResultRow> rows;
    double lo = 1e300;
    double hi = -1e300;
    for (int i = 0; i < 100; ++i) {
        const double tx = rng.uniform(1, 200);
        lo = std::min(lo, std::floor(tx));
        hi = std::max(hi, std::floor(tx));
        rows.push_back(make_row("normal", 25, 5, static_cast<std::uint64_t>(i),
                                rng.next_double() < 0.7, std::floor(tx), 2 + rng.next_below(5)));
    }
    auto shuffled = rows;
    std::mt19937 urng(99);
    std::shuffle(shuffled.begin(), shuffled.end(), urng);

    const auto a = aggregate(rows);
    const auto b = aggregate(shuffled);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    REQUIRE(a[0].transmissions->mean == b[0].transmissions->mean);
    REQUIRE(a[0].transmissions->median == b[0].transmissions->median);
    REQUIRE(a[0].transmissions->p95 == b[0].transmissions->p95);
    REQUIRE(a[0].delivery_ratio == b[0].delivery_ratio);
    REQUIRE(a[0].transmissions->mean >= lo);
    REQUIRE(a[0].transmissions->mean <= hi);
    // delivered-only columns only count delivered rows
    REQUIRE(a[0].h_hops->count == a[0].delivered);
}

TEST_CASE("grouping keys split and collapse as requested") {
    std::vector<ResultRow> rows;
    for (std::uint32_t n : {25u, 50u})
        for (std::uint32_t ps : {5u, 10u})
            rows.push_back(make_row("ssf", n, ps, 1, true, 10, 2));
    REQUIRE(aggregate(rows, GroupBy::Full).size() == 4);
    const auto by_nodes = aggregate(rows, GroupBy::Nodes);
    REQUIRE(by_nodes.size() == 2);
    REQUIRE(by_nodes[0].rows == 2);
    REQUIRE_FALSE(by_nodes[0].packet_size.has_value());
    const auto by_ps = aggregate(rows, GroupBy::PacketSize);
    REQUIRE(by_ps.size() == 2);
    REQUIRE_FALSE(by_ps[0].nodes.has_value());
}
