#pragma once

#include <charconv>
#include <string_view>

namespace dtnsim::detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Strict, locale-free numeric parse of the whole (trimmed) string.
template <typename T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline bool split_once(std::string_view s, char sep, std::string_view& lhs, std::string_view& rhs) {
    const auto pos = s.find(sep);
    if (pos == std::string_view::npos) return false;
    lhs = s.substr(0, pos);
    rhs = s.substr(pos + 1);
    return true;
}

template <typename Fn>
void for_each_item(std::string_view list, Fn&& fn) {
    while (!list.empty()) {
        const auto pos = list.find(';');
        std::string_view item = pos == std::string_view::npos ? list : list.substr(0, pos);
        list = pos == std::string_view::npos ? std::string_view{} : list.substr(pos + 1);
        item = trim(item);
        if (!item.empty()) fn(item);
    }
}

} // namespace dtnsim::detail
