#pragma once

#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace daz {

/// Shortest-faithful numeric formatting used for all CSV payloads; output is a
/// pure function of the double value, so files are byte-stable across runs.
std::string format_number(double v);

/// Writes a rectangular CSV (header + rows) to `path`, creating directories.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<Vec>& rows);

/// Writes the metadata sidecar `path` (canonical key = value lines).
void write_meta(const std::string& path, const std::map<std::string, std::string>& kv);

}  // namespace daz
