#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cabinfare {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Whitespace-separated tokens (any run of blanks is one separator).
inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long> parse_long(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    long v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// Round half away from zero after scaling by 10^digits. Binary doubles sit a
// hair below decimal ties (0.00305 * 1e4 == 30.499999999999996), so a 1e-9
// nudge on the scaled magnitude makes decimal ties round the way a human
// reading the decimal would.
inline double round_half_away(double x, int digits) {
    if (!std::isfinite(x)) return x;
    const double scale = std::pow(10.0, digits);
    const double m = std::floor(std::fabs(x) * scale + 0.5 + 1e-9);
    return std::copysign(m / scale, x);
}

inline long round_half_away_long(double x) {
    return static_cast<long>(std::copysign(std::floor(std::fabs(x) + 0.5 + 1e-9), x));
}

// Fixed-decimal formatting on top of round_half_away (printf alone applies
// binary round-to-even to the unrounded value).
inline std::string format_fixed(double x, int digits) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, round_half_away(x, digits));
    std::string s(buf);
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        // canonicalize negative zero renderings like "-0.0000"
        bool all_zero = true;
        for (char c : s)
            if (c != '-' && c != '0' && c != '.') { all_zero = false; break; }
        if (all_zero) s.erase(0, 1);
    }
    return s;
}

// Shortest decimal form that round-trips to the same double (CSV emission:
// parse(format(x)) == x exactly, and the text is deterministic).
inline std::string format_shortest(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, p);
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) return false;
    return true;
}

}  // namespace cabinfare
