#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtnsim/batch.hpp"
#include "dtnsim/csvio.hpp"
#include "dtnsim/metrics.hpp"
#include "dtnsim/scenario.hpp"

namespace dtnsim {

// Exit codes: 0 success, 1 configuration error, 2 I/O error.
enum CliExit : int { kCliOk = 0, kCliConfigError = 1, kCliIoError = 2 };

namespace cli_detail {

inline bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return in.good() || in.eof();
}

inline int write_rows(const std::vector<ResultRow>& rows, const std::string& out_path) {
    if (out_path.empty()) {
        write_results_csv(std::cout, rows);
        return kCliOk;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open '" << out_path << "' for writing\n";
        return kCliIoError;
    }
    write_results_csv(out, rows);
    out.flush();
    if (!out.good()) {
        std::cerr << "error: failed writing '" << out_path << "'\n";
        return kCliIoError;
    }
    return kCliOk;
}

inline std::string stat_cell(const std::optional<StatTriple>& s, double StatTriple::*field) {
    if (!s) return "-";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", (*s).*field);
    return buf;
}

inline void print_summary(const std::vector<SummaryRow>& rows) {
    struct Col {
        const char* name;
        std::optional<StatTriple> SummaryRow::*stat;
    };
    static const Col cols[] = {
        {"tx", &SummaryRow::transmissions},
        {"covered", &SummaryRow::nodes_covered},
        {"hops", &SummaryRow::h_hops},
        {"dist_m", &SummaryRow::h_distance_m},
        {"tmin_s", &SummaryRow::t_min_s},
        {"pd", &SummaryRow::pd_paper},
        {"delay_s", &SummaryRow::delay_measured_s},
    };

    std::printf("%-10s %6s %6s %6s %8s", "protocol", "nodes", "psize", "runs", "dratio");
    for (const Col& c : cols)
        std::printf(" %12s_mean %12s_med %12s_p95", c.name, c.name, c.name);
    std::printf("\n");
    for (const SummaryRow& r : rows) {
        std::printf("%-10s %6s %6s %6zu %8.3f", r.protocol.c_str(),
                    r.nodes ? std::to_string(*r.nodes).c_str() : "-",
                    r.packet_size ? std::to_string(*r.packet_size).c_str() : "-", r.rows,
                    r.delivery_ratio);
        for (const Col& c : cols) {
            std::printf(" %17s %16s %16s", stat_cell(r.*(c.stat), &StatTriple::mean).c_str(),
                        stat_cell(r.*(c.stat), &StatTriple::median).c_str(),
                        stat_cell(r.*(c.stat), &StatTriple::p95).c_str());
        }
        std::printf("\n");
    }
}

} // namespace cli_detail

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"delay-tolerant MANET routing simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string seeds_spec;
    std::string protocols_spec;
    std::string out_path;
    auto* run_cmd = app.add_subcommand("run", "run one scenario over seeds and protocols");
    run_cmd->add_option("scenario", scenario_path, "scenario file (key=value lines)")->required();
    run_cmd->add_option("--seeds", seeds_spec, "inclusive seed range a..b (default: scenario seed)");
    run_cmd->add_option("--protocols", protocols_spec,
                        "comma list of protocols (default: scenario protocol)");
    run_cmd->add_option("--out", out_path, "output CSV path (default: stdout)");

    std::string csv_path;
    std::string by_spec;
    auto* sum_cmd = app.add_subcommand("summarize", "aggregate a results CSV");
    sum_cmd->add_option("csv", csv_path, "results CSV produced by run/sweep-paper")->required();
    sum_cmd->add_option("--by", by_spec, "collapse grouping to nodes|packet_size");

    std::string sweep_seeds_spec = "1..20";
    std::string sweep_out_path;
    auto* sweep_cmd = app.add_subcommand(
        "sweep-paper", "run the comparison grid: nodes x packet sizes x {normal,ssf} x dead ends");
    sweep_cmd->add_option("--seeds", sweep_seeds_spec, "inclusive seed range (default 1..20)");
    sweep_cmd->add_option("--out", sweep_out_path, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return kCliConfigError;
    }

    if (run_cmd->parsed()) {
        std::string text;
        if (!cli_detail::read_file(scenario_path, text)) {
            std::cerr << "error: cannot read scenario '" << scenario_path << "'\n";
            return kCliIoError;
        }
        ScenarioParse parsed = parse_scenario(text);
        if (!parsed.ok()) {
            for (const auto& e : parsed.errors)
                std::cerr << scenario_path << ": " << e << "\n";
            return kCliConfigError;
        }
        std::vector<std::uint64_t> seeds = {parsed.config.seed};
        if (!seeds_spec.empty()) {
            auto s = parse_seed_range(seeds_spec);
            if (!s) {
                std::cerr << "error: --seeds expects an inclusive range a..b\n";
                return kCliConfigError;
            }
            seeds = std::move(*s);
        }
        std::vector<ProtocolKind> protocols = {parsed.config.protocol};
        if (!protocols_spec.empty()) {
            protocols.clear();
            std::string_view rest = protocols_spec;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                std::string name(detail::trim(
                    comma == std::string_view::npos ? rest : rest.substr(0, comma)));
                rest = comma == std::string_view::npos ? std::string_view{}
                                                       : rest.substr(comma + 1);
                auto p = protocol_from_name(name);
                if (!p) {
                    std::cerr << "error: --protocols: unknown protocol '" << name << "'\n";
                    return kCliConfigError;
                }
                protocols.push_back(*p);
            }
            if (protocols.empty()) {
                std::cerr << "error: --protocols: empty list\n";
                return kCliConfigError;
            }
        }
        std::vector<ResultRow> rows;
        try {
            rows = run_batch(parsed.config, seeds, protocols);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kCliConfigError;
        }
        return cli_detail::write_rows(rows, out_path);
    }

    if (sum_cmd->parsed()) {
        std::string text;
        if (!cli_detail::read_file(csv_path, text)) {
            std::cerr << "error: cannot read csv '" << csv_path << "'\n";
            return kCliIoError;
        }
        CsvParse parsed = parse_results_csv(text);
        if (!parsed.ok()) {
            for (const auto& e : parsed.errors)
                std::cerr << csv_path << ": " << e << "\n";
            return kCliConfigError;
        }
        GroupBy by = GroupBy::Full;
        if (by_spec == "nodes") by = GroupBy::Nodes;
        else if (by_spec == "packet_size") by = GroupBy::PacketSize;
        else if (!by_spec.empty()) {
            std::cerr << "error: --by expects nodes or packet_size\n";
            return kCliConfigError;
        }
        cli_detail::print_summary(aggregate(parsed.rows, by));
        return kCliOk;
    }

    // sweep-paper
    auto seeds = parse_seed_range(sweep_seeds_spec);
    if (!seeds) {
        std::cerr << "error: --seeds expects an inclusive range a..b\n";
        return kCliConfigError;
    }
    return cli_detail::write_rows(sweep_paper(*seeds), sweep_out_path);
}

} // namespace dtnsim
