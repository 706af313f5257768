#include "fast/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "fast/builtin_packages.hpp"
#include "fast/error.hpp"

namespace fast {

Config Config::defaults() {
  Config c;
  c.packages = packages::builtin_names();
  c.map_workers = std::max(1u, std::thread::hardware_concurrency());
  return c;
}

void Config::set_bind(const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    fail(ErrorCode::BadRequest, "bind address must be host:port, got '" + bind + "'");
  }
  int p = 0;
  auto tail = std::string_view(bind).substr(colon + 1);
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), p);
  if (ec != std::errc() || ptr != tail.data() + tail.size() || p < 0 || p > 65535) {
    fail(ErrorCode::BadRequest, "invalid port in bind address '" + bind + "'");
  }
  host = bind.substr(0, colon);
  port = p;
}

void Config::merge(const Value& doc) {
  if (!doc.is_object()) fail(ErrorCode::BadRequest, "config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "bind") set_bind(v.get<std::string>());
      else if (key == "packages") packages = v.get<std::vector<std::string>>();
      else if (key == "store") store_file = v.is_null() ? std::nullopt : std::optional<std::filesystem::path>(v.get<std::string>());
      else if (key == "depth") depth = v.get<int>();
      else if (key == "max_bytes") max_bytes = v.get<std::size_t>();
      else if (key == "check_purity") check_purity = v.get<bool>();
      else if (key == "map_workers") map_workers = std::max(1u, v.get<unsigned>());
      else fail(ErrorCode::BadRequest, "unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::BadRequest, "config key '" + key + "' has the wrong type");
    }
  }
}

void Config::merge_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::BadRequest, "cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  merge(parse_json(buf.str()));
}

void Config::validate() const {
  auto known = packages::builtin_names();
  for (const auto& p : packages) {
    if (std::find(known.begin(), known.end(), p) == known.end()) {
      fail(ErrorCode::BadRequest, "unknown package '" + p + "'");
    }
  }
  if (depth < 1) fail(ErrorCode::BadRequest, "depth must be at least 1");
  if (max_bytes < 1024) fail(ErrorCode::BadRequest, "max_bytes must be at least 1024");
}

}  // namespace fast
