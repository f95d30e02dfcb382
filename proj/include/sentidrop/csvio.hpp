#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentidrop::csvio {

// RFC-4180: quoted fields may contain commas, doubled quotes and newlines.
// Rows are returned verbatim (no trimming); the caller decides semantics.
std::vector<std::vector<std::string>> parse(std::string_view text);
std::vector<std::vector<std::string>> read_file(const std::string& path);

std::string escape_field(std::string_view field);
void write_file(const std::string& path, const std::vector<std::vector<std::string>>& rows);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
bool parse_double(std::string_view field, double& out);

}  // namespace sentidrop::csvio
