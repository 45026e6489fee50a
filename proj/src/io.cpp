#include "shortcut/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace shortcut::io {

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text, const std::string& path, std::size_t line) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, value);
    if (result.ec != std::errc() || result.ptr != end)
        throw ParseError(path, line, "expected a number, found '" + std::string(text) + "'");
    return value;
}

long long parse_int(std::string_view text, const std::string& path, std::size_t line) {
    long long value = 0;
    const auto* end = text.data() + text.size();
    const auto result = std::from_chars(text.data(), end, value);
    if (result.ec != std::errc() || result.ptr != end)
        throw ParseError(path, line, "expected an integer, found '" + std::string(text) + "'");
    return value;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto temp = path;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("IO", "cannot open " + temp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(temp, ignored);
            throw Error("IO", "failed writing " + temp.string());
        }
    }
    std::filesystem::rename(temp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("MISSING_FILE", "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string header_line(const FileHeader& header) {
    std::string line = "# format=" + header.format + " version=" + std::to_string(header.version);
    for (const auto& [key, value] : header.attributes) line += " " + key + "=" + value;
    return line;
}

FileHeader parse_header(std::string_view line, const std::string& path) {
    if (line.substr(0, 2) != "# ") throw ParseError(path, 1, "missing '# format=... version=...' header line");
    FileHeader header;
    std::string_view rest = line.substr(2);
    while (!rest.empty()) {
        const auto space = rest.find(' ');
        const auto token = rest.substr(0, space);
        rest = space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string_view::npos) throw ParseError(path, 1, "malformed header token '" + std::string(token) + "'");
        const std::string key(token.substr(0, eq));
        const std::string value(token.substr(eq + 1));
        if (key == "format")
            header.format = value;
        else if (key == "version")
            header.version = static_cast<int>(parse_int(value, path, 1));
        else
            header.attributes[key] = value;
    }
    if (header.format.empty()) throw ParseError(path, 1, "header has no format");
    return header;
}

FileHeader expect_header(std::string_view line, const std::string& path, std::string_view format, int version) {
    auto header = parse_header(line, path);
    if (header.format != format)
        throw VersionError(path + ": expected a '" + std::string(format) + "' file, found '" + header.format + "'");
    if (header.version != version)
        throw VersionError(path + ": unsupported " + header.format + " version " + std::to_string(header.version) +
                           " (expected " + std::to_string(version) + ")");
    return header;
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += csv_field(fields[i]);
    }
    row += '\n';
    return row;
}

std::vector<std::string> split_csv_line(std::string_view line, const std::string& path, std::size_t line_number) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            if (!current.empty() || was_quoted) throw ParseError(path, line_number, "stray quote inside field");
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            was_quoted = false;
        } else {
            if (was_quoted) throw ParseError(path, line_number, "text after closing quote");
            current += c;
        }
    }
    if (quoted) throw ParseError(path, line_number, "unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

} // namespace shortcut::io
