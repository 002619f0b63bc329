#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace corrscreen {

/// Shortest decimal text that parses back to exactly `value` (at most 17
/// significant digits).
std::string format_double(double value);

/// Parses a decimal or scientific literal occupying all of `text`.
/// Throws ParseError naming `context` on failure.
double parse_double(std::string_view text, std::string_view context);

/// Writes `content` to a temporary sibling of `path` and renames it into
/// place, so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Reads a whole file; throws Error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace corrscreen
