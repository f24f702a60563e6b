#include "taptrace/config.hpp"

#include <stdexcept>

#include "taptrace/text.hpp"

namespace taptrace {

bool Config::has(const std::string& section, const std::string& key) const {
    const auto sec = sections.find(section);
    return sec != sections.end() && sec->second.count(key) > 0;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const auto sec = sections.find(section);
    if (sec == sections.end()) return fallback;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? fallback : it->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_double(sections.at(section).at(key));
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
    if (!has(section, key)) return fallback;
    return parse_int64(sections.at(section).at(key));
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = to_lower(sections.at(section).at(key));
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw std::runtime_error("config key " + section + "." + key +
                             ": not a boolean: '" + v + "'");
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
    sections[section][key] = value;
}

Config parse_config_text(std::string_view text) {
    Config cfg;
    std::string current;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = raw;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": unterminated section header");
            }
            current = std::string(trim(line.substr(1, line.size() - 2)));
            cfg.sections[current];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": empty key");
        }
        cfg.sections[current][key] = value;
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

}  // namespace taptrace
