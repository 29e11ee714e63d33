#pragma once

#include <string>
#include <vector>

namespace dmarket::detail {

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& content);

/// Minimal CSV reader: comma separated, double quotes with "" escapes,
/// tolerant of CRLF line ends. Skips fully empty trailing lines.
std::vector<std::vector<std::string>> parseCsv(const std::string& text);

}  // namespace dmarket::detail
