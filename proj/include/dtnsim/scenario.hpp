#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dtnsim/core.hpp"
#include "dtnsim/parse_util.hpp"

namespace dtnsim {

// Plain key=value scenario files: one key per line, '#' comments, unknown
// keys rejected. Absent keys take the documented defaults (see SimConfig
// and the README table). `failures` is a semicolon list "node@slot",
// `traffic` a semicolon list "src>dst@slot".

struct ScenarioParse {
    SimConfig config;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

inline ScenarioParse parse_scenario(std::string_view text) {
    ScenarioParse out;
    SimConfig& c = out.config;
    bool traffic_given = false;

    std::vector<std::string> seen_keys;
    int line_no = 0;
    int traffic_line = 0;
    int failures_line = 0;
    std::string_view rest = text;
    while (!rest.empty() || line_no == 0) {
        if (rest.empty()) break;
        const auto nl = rest.find('\n');
        std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;

        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        std::string_view key, value;
        if (!detail::split_once(line, '=', key, value)) {
            out.errors.push_back("line " + std::to_string(line_no) +
                                 ": malformed line (expected key=value)");
            continue;
        }
        key = detail::trim(key);
        value = detail::trim(value);
        const std::string key_s(key);

        if (std::find(seen_keys.begin(), seen_keys.end(), key_s) != seen_keys.end()) {
            out.errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" +
                                 key_s + "'");
            continue;
        }
        seen_keys.push_back(key_s);

        auto bad_value = [&](const char* what) {
            out.errors.push_back("line " + std::to_string(line_no) + ": " + key_s + ": " + what +
                                 " '" + std::string(value) + "'");
        };

        if (key == "nodes") {
            if (!detail::parse_number(value, c.num_nodes)) bad_value("not a valid count");
        } else if (key == "area_w") {
            if (!detail::parse_number(value, c.area_w)) bad_value("not a valid number");
        } else if (key == "area_h") {
            if (!detail::parse_number(value, c.area_h)) bad_value("not a valid number");
        } else if (key == "range") {
            if (!detail::parse_number(value, c.tx_range)) bad_value("not a valid number");
        } else if (key == "slot_s") {
            if (!detail::parse_number(value, c.slot_duration)) bad_value("not a valid number");
        } else if (key == "max_slots") {
            if (!detail::parse_number(value, c.max_slots)) bad_value("not a valid count");
        } else if (key == "vmin") {
            if (!detail::parse_number(value, c.v_min)) bad_value("not a valid number");
        } else if (key == "vmax") {
            if (!detail::parse_number(value, c.v_max)) bad_value("not a valid number");
        } else if (key == "L") {
            if (!detail::parse_number(value, c.copy_budget)) bad_value("not a valid count");
        } else if (key == "packet_size") {
            if (!detail::parse_number(value, c.packet_size)) bad_value("not a valid count");
        } else if (key == "protocol") {
            auto p = protocol_from_name(std::string(value));
            if (!p) bad_value("unknown value");
            else c.protocol = *p;
        } else if (key == "contention") {
            if (value == "on") c.contention_enabled = true;
            else if (value == "off") c.contention_enabled = false;
            else bad_value("expected on|off");
        } else if (key == "seed") {
            if (!detail::parse_number(value, c.seed)) bad_value("not a valid seed");
        } else if (key == "failures") {
            failures_line = line_no;
            c.failures.clear();
            detail::for_each_item(value, [&](std::string_view item) {
                std::string_view node_s, slot_s;
                FailureSpec f;
                if (!detail::split_once(item, '@', node_s, slot_s) ||
                    !detail::parse_number(node_s, f.node) ||
                    !detail::parse_number(slot_s, f.fail_slot)) {
                    out.errors.push_back("line " + std::to_string(line_no) +
                                         ": failures: expected node@slot, got '" +
                                         std::string(item) + "'");
                    return;
                }
                c.failures.push_back(f);
            });
        } else if (key == "traffic") {
            traffic_line = line_no;
            traffic_given = true;
            c.traffic.clear();
            detail::for_each_item(value, [&](std::string_view item) {
                std::string_view src_s, tail, dst_s, slot_s;
                TrafficSpec t;
                if (!detail::split_once(item, '>', src_s, tail) ||
                    !detail::split_once(tail, '@', dst_s, slot_s) ||
                    !detail::parse_number(src_s, t.source) ||
                    !detail::parse_number(dst_s, t.destination) ||
                    !detail::parse_number(slot_s, t.creation_slot)) {
                    out.errors.push_back("line " + std::to_string(line_no) +
                                         ": traffic: expected src>dst@slot, got '" +
                                         std::string(item) + "'");
                    return;
                }
                c.traffic.push_back(t);
            });
        } else {
            out.errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key_s +
                                 "'");
        }
    }

    // Default workload: one message across the id range at slot 0.
    if (!traffic_given && c.num_nodes >= 2) {
        c.traffic = {TrafficSpec{0, c.num_nodes - 1, 0}};
    }

    if (out.errors.empty()) {
        for (const std::string& v : validate_config(c)) {
            int line = 0;
            if (v.rfind("traffic", 0) == 0) line = traffic_line;
            else if (v.rfind("failures", 0) == 0) line = failures_line;
            if (line > 0)
                out.errors.push_back("line " + std::to_string(line) + ": " + v);
            else
                out.errors.push_back(v);
        }
    }
    return out;
}

namespace detail {

inline std::string num_str(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace detail

// Canonical form; parse(emit(c)) reproduces c exactly.
inline std::string emit_scenario(const SimConfig& c) {
    std::string s;
    auto kv = [&](const char* k, const std::string& v) {
        s += k;
        s += '=';
        s += v;
        s += '\n';
    };
    kv("nodes", std::to_string(c.num_nodes));
    kv("area_w", detail::num_str(c.area_w));
    kv("area_h", detail::num_str(c.area_h));
    kv("range", detail::num_str(c.tx_range));
    kv("slot_s", detail::num_str(c.slot_duration));
    kv("max_slots", std::to_string(c.max_slots));
    kv("vmin", detail::num_str(c.v_min));
    kv("vmax", detail::num_str(c.v_max));
    kv("L", std::to_string(c.copy_budget));
    kv("packet_size", std::to_string(c.packet_size));
    kv("protocol", protocol_name(c.protocol));
    kv("contention", c.contention_enabled ? "on" : "off");
    std::string f;
    for (const auto& x : c.failures) {
        if (!f.empty()) f += ';';
        f += std::to_string(x.node) + "@" + std::to_string(x.fail_slot);
    }
    kv("failures", f);
    std::string t;
    for (const auto& x : c.traffic) {
        if (!t.empty()) t += ';';
        t += std::to_string(x.source) + ">" + std::to_string(x.destination) + "@" +
             std::to_string(x.creation_slot);
    }
    kv("traffic", t);
    kv("seed", std::to_string(c.seed));
    return s;
}

} // namespace dtnsim
