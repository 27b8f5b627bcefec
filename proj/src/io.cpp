#include "sawspin/io.hpp"

#include <cstdio>
#include <fstream>

#include "sawspin/errors.hpp"

namespace sawspin::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

namespace {

std::string meta_block(const FileMeta& meta) {
  std::string s;
  s += "# tool=sawspin " + meta.tool_version + "\n";
  s += "# subcommand=" + meta.subcommand + "\n";
  s += "# config_hash=" + meta.config_hash + "\n";
  s += "# seed=" + std::to_string(meta.seed) + "\n";
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw config_error("cannot write output file '" + path.string() + "'");
  }
  out << data;
  if (!out) {
    throw config_error("failed writing output file '" + path.string() + "'");
  }
}

}  // namespace

void write_csv(const std::filesystem::path& path, const FileMeta& meta,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::string buffer = meta_block(meta);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    buffer += columns[i];
    buffer += i + 1 < columns.size() ? "," : "\n";
  }
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      throw config_error("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      buffer += format_double(row[i]);
      buffer += i + 1 < row.size() ? "," : "\n";
    }
  }
  write_file(path, buffer);
}

void write_json(const std::filesystem::path& path, const FileMeta& meta,
                const nlohmann::json& payload) {
  nlohmann::json j = payload;
  j["meta"]["tool"] = "sawspin " + meta.tool_version;
  j["meta"]["subcommand"] = meta.subcommand;
  j["meta"]["config_hash"] = meta.config_hash;
  j["meta"]["seed"] = meta.seed;
  write_file(path, j.dump(2) + "\n");
}

}  // namespace sawspin::io
