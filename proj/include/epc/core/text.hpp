#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace epc {

// Splits one CSV line. Double-quoted fields may contain separators and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, char sep = ',');

// Quotes a field only when it contains a separator, quote, or newline.
std::string csv_field(std::string_view value);

std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view text);

// Parses a double, accepting "NaN"/"nan". Throws DataError with `what` in the message.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

// Fixed-point rendering with `decimals` digits; negative zero renders as zero.
std::string format_fixed(double value, int decimals);

// Shortest round-trip decimal representation.
std::string format_exact(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Reads every non-empty line; strips trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

} // namespace epc
