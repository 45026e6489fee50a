#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "shortcut/errors.hpp"

namespace shortcut::io {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text, const std::string& path, std::size_t line);
long long parse_int(std::string_view text, const std::string& path, std::size_t line);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partial file. Parent directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// First line of every file: "# format=<name> version=<n> [key=value ...]".
struct FileHeader {
    std::string format;
    int version = 0;
    std::map<std::string, std::string> attributes;
};

std::string header_line(const FileHeader& header);
FileHeader parse_header(std::string_view line, const std::string& path);
// Parses and checks format name and version; VersionError on mismatch.
FileHeader expect_header(std::string_view line, const std::string& path, std::string_view format, int version);

std::string csv_field(std::string_view field);
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::string> split_csv_line(std::string_view line, const std::string& path, std::size_t line_number);

// Splits text into lines (LF or CRLF); a trailing newline does not produce an
// empty final line.
std::vector<std::string_view> split_lines(std::string_view text);

} // namespace shortcut::io
