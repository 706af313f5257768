#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fast/value.hpp"

namespace fast {

/// Server configuration. The JSON file form uses the same field names:
///
///   {"bind": "127.0.0.1:8080", "packages": ["pricer"], "store": "store.json",
///    "depth": 8, "max_bytes": 1048576, "check_purity": false, "map_workers": 4}
struct Config {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> packages;  // empty list is filled with every builtin
  std::optional<std::filesystem::path> store_file;
  int depth = 8;
  std::size_t max_bytes = 1 << 20;
  bool check_purity = false;
  unsigned map_workers = 1;

  static Config defaults();

  /// Fields present in `doc` override this config. BadRequest on unknown
  /// keys or wrong types.
  void merge(const Value& doc);
  void merge_file(const std::filesystem::path& file);

  /// "host:port"; BadRequest when malformed.
  void set_bind(const std::string& bind);
  std::string bind() const { return host + ":" + std::to_string(port); }

  /// BadRequest unless packages exist, depth >= 1 and max_bytes >= 1024.
  void validate() const;
};

}  // namespace fast
