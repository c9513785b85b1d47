#include "csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "config.hpp"

namespace daz {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<Vec>& rows) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Error::Code::Io, "cannot open '" + path + "' for writing");
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const Vec& row : rows) {
    require(row.size() == header.size(), Error::Code::Runtime, "csv row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_number(row[i]);
    }
    out << '\n';
  }
  require(out.good(), Error::Code::Io, "write failed for '" + path + "'");
}

void write_meta(const std::string& path, const std::map<std::string, std::string>& kv) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Error::Code::Io, "cannot open '" + path + "' for writing");
  out << emit_key_values(kv);
  require(out.good(), Error::Code::Io, "write failed for '" + path + "'");
}

}  // namespace daz
