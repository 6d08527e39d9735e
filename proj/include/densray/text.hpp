#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace densray {

// Small text utilities shared by the file formats.

std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_whitespace(std::string_view s);
/// Splits on '\n', strips a trailing '\r' per line and drops a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);
std::string_view trim(std::string_view s);
bool has_whitespace(std::string_view s);

/// Locale-independent; the whole field must be consumed.
bool parse_double(std::string_view s, double& out);
bool parse_size(std::string_view s, std::size_t& out);
bool parse_int64(std::string_view s, long long& out);
std::vector<double> parse_doubles(std::string_view line);

/// Shortest round-trip representation.
std::string format_double(double v);
/// Fixed number of significant digits (general format).
std::string format_double(double v, int precision);
/// Fixed-point with `decimals` digits; NaN prints as "nan".
std::string format_fixed(double v, int decimals);
std::string join_doubles(std::span<const double> values, int precision = 17);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace densray
