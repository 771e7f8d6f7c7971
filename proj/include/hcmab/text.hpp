#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hcmab::text {

/// Shortest round-trip decimal form ("inf", "-inf", "nan" for non-finite).
std::string format_double(double x);

double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);
bool parse_bool(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

template <typename Range, typename Fn>
std::string join(const Range& items, char sep, Fn&& fn) {
    std::string out;
    bool first = true;
    for (const auto& item : items) {
        if (!first) out.push_back(sep);
        first = false;
        out += fn(item);
    }
    return out;
}

}  // namespace hcmab::text
