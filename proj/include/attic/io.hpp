#pragma once

#include <string>
#include <vector>

namespace attic::io {

// Shortest round-trip decimal form (std::to_chars); keeps emitted CSVs
// byte-stable across runs.
std::string format_double(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::vector<std::string> split(const std::string& line, char sep);

// Parse "name=value" observation arguments.
std::pair<std::string, double> parse_assignment(const std::string& arg);

}  // namespace attic::io
