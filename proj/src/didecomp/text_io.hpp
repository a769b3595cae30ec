#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace didecomp {

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double value);

/// Point-decimal text with a fixed number of decimals; never prints "-0.00".
std::string format_fixed(double value, int decimals);

/// Like format_fixed but with an explicit sign for positive values ("+449.0").
std::string format_signed(double value, int decimals);

/// Point-decimal real; the whole (trimmed) cell must be consumed and the
/// value must be finite.
std::optional<double> parse_double_strict(std::string_view text);

std::string_view trim(std::string_view text);

/// Reads a text file into lines. Strips a UTF-8 BOM and CR of CRLF endings.
/// Throws DataError if the file cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<std::string_view> split_csv_line(std::string_view line);

/// Throws ConfigError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace didecomp
