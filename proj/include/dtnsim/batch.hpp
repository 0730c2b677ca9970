#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/csvio.hpp"
#include "dtnsim/engine.hpp"
#include "dtnsim/parse_util.hpp"
#include "dtnsim/rng.hpp"

namespace dtnsim {

// Inclusive "a..b" (or a single "a") seed range.
inline std::optional<std::vector<std::uint64_t>> parse_seed_range(std::string_view spec) {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    const auto dots = spec.find("..");
    if (dots == std::string_view::npos) {
        if (!detail::parse_number(spec, lo)) return std::nullopt;
        hi = lo;
    } else {
        if (!detail::parse_number(spec.substr(0, dots), lo)) return std::nullopt;
        if (!detail::parse_number(spec.substr(dots + 2), hi)) return std::nullopt;
    }
    if (hi < lo) return std::nullopt;
    std::vector<std::uint64_t> out;
    out.reserve(hi - lo + 1);
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    return out;
}

// SIM_THREADS caps batch parallelism; unset means one worker per core.
inline unsigned batch_threads() {
    if (const char* env = std::getenv("SIM_THREADS")) {
        std::uint32_t v = 0;
        if (detail::parse_number(std::string_view(env), v) && v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace detail {

// Runs the task list in parallel but collects output by task index, so the
// emitted row order never depends on scheduling.
inline std::vector<std::vector<ResultRow>> run_tasks(const std::vector<SimConfig>& tasks,
                                                     unsigned threads) {
    std::vector<std::vector<ResultRow>> results(tasks.size());
    auto work = [&](std::atomic<std::size_t>& next) {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            RunOptions opt;
            opt.keep_log = false;
            results[i] = rows_from_run(run_simulation(tasks[i], opt));
        }
    };
    std::atomic<std::size_t> next{0};
    if (threads <= 1 || tasks.size() <= 1) {
        work(next);
        return results;
    }
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back([&] { work(next); });
    for (auto& t : pool) t.join();
    return results;
}

} // namespace detail

// Cross product (protocols x seeds) over one base scenario; rows come back
// in (protocol, seed, msg_id) order regardless of worker interleaving.
inline std::vector<ResultRow> run_batch(const SimConfig& base,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::vector<ProtocolKind>& protocols,
                                        unsigned threads = batch_threads()) {
    std::vector<SimConfig> tasks;
    tasks.reserve(seeds.size() * protocols.size());
    for (ProtocolKind p : protocols) {
        for (std::uint64_t s : seeds) {
            SimConfig c = base;
            c.protocol = p;
            c.seed = s;
            tasks.push_back(std::move(c));
        }
    }
    auto results = detail::run_tasks(tasks, threads);
    std::vector<ResultRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

// Deterministic dead-end schedule for sweeps: a tenth of the fleet (at
// least one node), never the endpoints of the default message, failing at
// seed-drawn slots in the first 500.
inline std::vector<FailureSpec> make_sweep_failures(std::uint32_t num_nodes, std::uint64_t seed,
                                                    NodeId keep_a, NodeId keep_b) {
    SplitMix64 rng(mix_seed(seed, num_nodes, static_cast<std::uint64_t>(StreamKind::Failures)));
    const std::uint32_t k = std::max<std::uint32_t>(1, num_nodes / 10);
    std::vector<FailureSpec> out;
    std::vector<std::uint8_t> taken(num_nodes, 0);
    taken[keep_a] = taken[keep_b] = 1;
    while (out.size() < k && out.size() + 2 < num_nodes) {
        const NodeId n = static_cast<NodeId>(rng.next_below(num_nodes));
        if (taken[n]) continue;
        taken[n] = 1;
        out.push_back(FailureSpec{n, static_cast<Slot>(rng.next_below(500))});
    }
    return out;
}

// Comparison workload: four concurrent flows across the id range. A single
// message leaves flooding essentially uncontended; the load is what makes
// the medium competitive, which is the regime the protocols are compared
// in.
inline SimConfig sweep_cell_config(std::uint32_t nodes, std::uint32_t packet_size,
                                   ProtocolKind protocol, bool with_failures,
                                   std::uint64_t seed) {
    SimConfig c;
    c.num_nodes = nodes;
    c.packet_size = packet_size;
    c.protocol = protocol;
    c.seed = seed;
    c.traffic.clear();
    const std::uint32_t flows = nodes >= 8 ? 4 : 1;
    for (std::uint32_t m = 0; m < flows; ++m)
        c.traffic.push_back(TrafficSpec{m, nodes - 1 - m, 0});
    if (with_failures) c.failures = make_sweep_failures(nodes, seed, 0, nodes - 1);
    return c;
}

// The full comparison grid: node counts {25,50,75,100} x packet sizes
// {5,10,15,20,25} x {normal, ssf} x {failures off, on}. Rows are emitted
// with the failure-free half of the grid first; within each half the order
// is (nodes, packet_size, protocol, seed).
inline std::vector<ResultRow> sweep_paper(const std::vector<std::uint64_t>& seeds,
                                          unsigned threads = batch_threads()) {
    static constexpr std::uint32_t kNodes[] = {25, 50, 75, 100};
    static constexpr std::uint32_t kPacketSizes[] = {5, 10, 15, 20, 25};
    static constexpr ProtocolKind kProtocols[] = {ProtocolKind::Normal,
                                                  ProtocolKind::SpraySelectFocus};
    std::vector<SimConfig> tasks;
    for (bool with_failures : {false, true}) {
        for (std::uint32_t n : kNodes) {
            for (std::uint32_t ps : kPacketSizes) {
                for (ProtocolKind p : kProtocols) {
                    for (std::uint64_t s : seeds) {
                        tasks.push_back(sweep_cell_config(n, ps, p, with_failures, s));
                    }
                }
            }
        }
    }
    auto results = detail::run_tasks(tasks, threads);
    std::vector<ResultRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

} // namespace dtnsim
