#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace catglm::detail {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string shortest(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

/// Strict full-string parse; no leading/trailing garbage, finite only.
inline bool parse_double(const std::string& text, double& out) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
    while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
    if (begin == end) return false;
    const char* first = text.data() + begin;
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, text.data() + end, out);
    return res.ec == std::errc{} && res.ptr == text.data() + end && out == out &&
           out != 1.0 / 0.0 && out != -1.0 / 0.0;
}

}  // namespace catglm::detail
