#pragma once

// Minimal ordered key-value text format shared by factor spec files and run configs:
//
//   # comment
//   factor.A = 0.251, 1.257
//   response.units = kPa
//
// Keys keep their order of appearance; later duplicates override earlier ones.

#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybreg/errors.hpp"

namespace hybreg {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

/// Strict double parse: the whole token must be consumed.
inline std::optional<double> parse_double(std::string_view token) {
    const std::string t = trim(token);
    if (t.empty()) return std::nullopt;
    std::istringstream in(t);
    in.imbue(std::locale::classic());
    double v = 0.0;
    in >> v;
    if (in.fail()) return std::nullopt;
    in >> std::ws;
    if (!in.eof()) return std::nullopt;
    return v;
}

/// Splits on commas and/or whitespace, dropping empty pieces.
inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace detail

class KeyValueConfig {
public:
    using Entry = std::pair<std::string, std::string>;

    static KeyValueConfig parse(std::istream& in) {
        KeyValueConfig cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string body = detail::trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected 'key = value'", line_no, 0);
            std::string key = detail::trim(std::string_view(body).substr(0, eq));
            if (key.empty()) throw ParseError("empty key", line_no, 0);
            cfg.set(std::move(key), detail::trim(std::string_view(body).substr(eq + 1)));
        }
        return cfg;
    }

    static KeyValueConfig parse(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    void set(std::string key, std::string value) {
        for (auto& e : entries_) {
            if (e.first == key) {
                e.second = std::move(value);
                return;
            }
        }
        entries_.emplace_back(std::move(key), std::move(value));
    }

    std::optional<std::string> get(std::string_view key) const {
        for (const auto& e : entries_)
            if (e.first == key) return e.second;
        return std::nullopt;
    }

    bool contains(std::string_view key) const { return get(key).has_value(); }

    std::optional<double> get_double(std::string_view key) const {
        const auto v = get(key);
        if (!v) return std::nullopt;
        const auto d = detail::parse_double(*v);
        if (!d) throw SchemaError("key '" + std::string(key) + "' is not a number: '" + *v + "'");
        return d;
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }

private:
    std::vector<Entry> entries_;
};

}  // namespace hybreg
