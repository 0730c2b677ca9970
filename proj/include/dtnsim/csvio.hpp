#pragma once

#include <cstdio>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/engine.hpp"
#include "dtnsim/metrics.hpp"
#include "dtnsim/parse_util.hpp"

namespace dtnsim {

// Fixed results schema. Floats use six decimals, absent values are empty
// fields, rows are newline-terminated; together with the fixed row order
// this makes result files byte-reproducible.
inline constexpr const char* kResultsCsvHeader =
    "protocol,nodes,packet_size,seed,msg_id,delivered,transmissions,nodes_covered,"
    "h_hops,h_distance_m,t_min_s,pd_paper,delay_measured_s";

namespace detail {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace detail

inline std::string format_result_row(const ResultRow& r) {
    std::string s;
    s += r.protocol;
    s += ',';
    s += std::to_string(r.nodes);
    s += ',';
    s += std::to_string(r.packet_size);
    s += ',';
    s += std::to_string(r.seed);
    s += ',';
    s += std::to_string(r.msg_id);
    s += ',';
    s += r.delivered ? "1" : "0";
    s += ',';
    s += std::to_string(r.transmissions);
    s += ',';
    s += std::to_string(r.nodes_covered);
    s += ',';
    if (r.h_hops) s += std::to_string(*r.h_hops);
    s += ',';
    if (r.h_distance_m) s += detail::fixed6(*r.h_distance_m);
    s += ',';
    if (r.t_min_s) s += detail::fixed6(*r.t_min_s);
    s += ',';
    if (r.pd_paper) s += detail::fixed6(*r.pd_paper);
    s += ',';
    if (r.delay_measured_s) s += detail::fixed6(*r.delay_measured_s);
    return s;
}

inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kResultsCsvHeader << '\n';
    for (const ResultRow& r : rows) os << format_result_row(r) << '\n';
}

inline std::vector<ResultRow> rows_from_run(const RunResult& run) {
    std::vector<ResultRow> rows;
    rows.reserve(run.reports.size());
    for (const MetricsReport& m : run.reports) {
        ResultRow r;
        r.protocol = protocol_name(run.config.protocol);
        r.nodes = run.config.num_nodes;
        r.packet_size = run.config.packet_size;
        r.seed = run.seed;
        r.msg_id = m.msg_id;
        r.delivered = m.delivered;
        r.transmissions = m.transmissions;
        r.nodes_covered = m.nodes_covered;
        r.h_hops = m.h_hops;
        r.h_distance_m = m.h_distance_m;
        r.t_min_s = m.t_min_s;
        r.pd_paper = m.pd_paper;
        r.delay_measured_s = m.delay_measured_s;
        rows.push_back(std::move(r));
    }
    return rows;
}

struct CsvParse {
    std::vector<ResultRow> rows;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

inline CsvParse parse_results_csv(std::string_view text) {
    CsvParse out;
    int line_no = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            if (line != kResultsCsvHeader)
                out.errors.push_back("line 1: unexpected header");
            continue;
        }
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::string_view cur = line;
        while (true) {
            const auto comma = cur.find(',');
            if (comma == std::string_view::npos) {
                fields.push_back(cur);
                break;
            }
            fields.push_back(cur.substr(0, comma));
            cur = cur.substr(comma + 1);
        }
        if (fields.size() != 13) {
            out.errors.push_back("line " + std::to_string(line_no) + ": expected 13 fields");
            continue;
        }

        ResultRow r;
        r.protocol = std::string(fields[0]);
        bool ok = true;
        auto num = [&](std::string_view s, auto& v) {
            if (!detail::parse_number(s, v)) ok = false;
        };
        num(fields[1], r.nodes);
        num(fields[2], r.packet_size);
        num(fields[3], r.seed);
        num(fields[4], r.msg_id);
        std::uint32_t delivered = 0;
        num(fields[5], delivered);
        r.delivered = delivered != 0;
        num(fields[6], r.transmissions);
        num(fields[7], r.nodes_covered);
        auto opt_u32 = [&](std::string_view s, std::optional<std::uint32_t>& v) {
            if (s.empty()) return;
            std::uint32_t x = 0;
            num(s, x);
            v = x;
        };
        auto opt_f = [&](std::string_view s, std::optional<double>& v) {
            if (s.empty()) return;
            double x = 0;
            num(s, x);
            v = x;
        };
        opt_u32(fields[8], r.h_hops);
        opt_f(fields[9], r.h_distance_m);
        opt_f(fields[10], r.t_min_s);
        opt_f(fields[11], r.pd_paper);
        opt_f(fields[12], r.delay_measured_s);
        if (!ok) {
            out.errors.push_back("line " + std::to_string(line_no) + ": bad numeric field");
            continue;
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

} // namespace dtnsim
