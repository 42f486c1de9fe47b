#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace aismarkov {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-field parse; no leading/trailing garbage accepted.
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, long long& out);

/// Splits one delimited line (no quoting) into fields, trimming a trailing '\r'.
std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

std::string read_file(const std::filesystem::path& path);

/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

} // namespace aismarkov
