#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace taptrace {

/// INI-style configuration: `[section]` headers, `key = value` lines,
/// `#`/`;` comments. Keys before any header land in section "".
struct Config {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;

    void set(const std::string& section, const std::string& key,
             const std::string& value);
};

Config parse_config_text(std::string_view text);
Config parse_config_file(const std::string& path);

}  // namespace taptrace
