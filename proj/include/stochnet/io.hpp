#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stochnet::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

std::string_view trim(std::string_view s);
std::vector<std::string> split_csv_line(std::string_view line);
std::vector<std::string_view> split_lines(std::string_view text);

/// Strict full-string parse; returns false on trailing garbage or overflow.
bool parse_double(std::string_view text, double& out);

}  // namespace stochnet::io
