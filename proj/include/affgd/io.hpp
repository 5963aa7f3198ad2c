#pragma once

#include <string>
#include <vector>

namespace affgd {

/// Shortest round-trippable decimal form of v ("%.17g"). Used for all CSV
/// output so reruns are byte-identical.
std::string fmt_g17(double v);

/// Writes content to path via a temp file + rename so partial files are
/// never observed.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);

std::vector<double> parse_doubles(const std::string& csv_list);

}  // namespace affgd
