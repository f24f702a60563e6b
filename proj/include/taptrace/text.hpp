#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace taptrace {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Strict parsers; throw std::runtime_error naming the offending token.
double parse_double(std::string_view token);
std::int64_t parse_int64(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char delim);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string to_lower(std::string_view s);

}  // namespace taptrace
