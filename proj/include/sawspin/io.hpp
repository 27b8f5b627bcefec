#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Deterministic CSV/JSON output. Every file starts with a header block
// echoing the tool version, config hash and seed, so reruns are byte
// comparable.

namespace sawspin::io {

struct FileMeta {
  std::string tool_version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string subcommand;
};

// Fixed-format float (%.12g) so outputs are byte stable.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const FileMeta& meta,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& path, const FileMeta& meta,
                const nlohmann::json& payload);

}  // namespace sawspin::io
