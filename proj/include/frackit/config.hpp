#pragma once

// Flat configuration files:
//
//     # comment
//     [grid]
//     t_max = 2
//     points = 2049
//
// Keys are addressed as "section.key". Values stay strings until a typed
// getter converts them; conversion failures name the offending field.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"

namespace frackit {

/// Malformed or out-of-range configuration field.
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

class Config {
public:
    static Config parse(std::string_view text, const std::string& source = "<string>") {
        Config c;
        std::string section;
        std::size_t line_no = 0;
        std::istringstream in{std::string(text)};
        for (std::string line; std::getline(in, line);) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string s = trim(line);
            if (s.empty()) continue;
            const std::string where = source + ":" + std::to_string(line_no);
            if (s.front() == '[') {
                if (s.back() != ']') throw ConfigError(where + ": unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty()) throw ConfigError(where + ": empty section name");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
            const std::string key = trim(s.substr(0, eq));
            if (key.empty()) throw ConfigError(where + ": empty key");
            if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any [section]");
            c.values_[section + "." + key] = trim(s.substr(eq + 1));
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    /// "section.key=value"
    void apply_override(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
        const std::string key = trim(assignment.substr(0, eq));
        if (key.find('.') == std::string::npos)
            throw ConfigError("override key '" + key + "' must look like section.key");
        values_[key] = trim(assignment.substr(eq + 1));
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required field '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long get_int(const std::string& key) const {
        const std::string v = get_string(key);
        long out = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || p != v.data() + v.size())
            throw ConfigError("field '" + key + "': '" + v + "' is not an integer");
        return out;
    }

    long get_int(const std::string& key, long fallback) const { return has(key) ? get_int(key) : fallback; }

    /// Comma-separated numbers.
    std::vector<double> get_list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(get_string(key));
        for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(key, trim(item)));
        return out;
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& key, const std::string& v) {
        double out = 0.0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out))
            throw ConfigError("field '" + key + "': '" + v + "' is not a finite number");
        return out;
    }

    std::map<std::string, std::string> values_;
};

}  // namespace frackit
