#include "fast/rest_machine.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "fast/error.hpp"

namespace fast::rest {

namespace {

constexpr std::string_view kPrefix = "/rest/";

std::string_view why_invalid(std::string_view path) noexcept {
  if (!path.starts_with(kPrefix)) return "must begin with /rest/";
  if (path.find('?') != std::string_view::npos) return "must not contain a query string";
  if (path.find("{{") != std::string_view::npos || path.find("}}") != std::string_view::npos) {
    return "must not contain template braces";
  }
  std::string_view rest = path.substr(kPrefix.size());
  if (rest.empty()) return "must name a resource";
  std::size_t start = 0;
  while (true) {
    std::size_t slash = rest.find('/', start);
    std::string_view seg = rest.substr(start, slash == std::string_view::npos ? rest.npos : slash - start);
    if (seg.empty()) return "must not contain empty segments";
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return {};
}

}  // namespace

ResourceUri ResourceUri::parse(std::string_view path) {
  if (auto reason = why_invalid(path); !reason.empty()) {
    fail(ErrorCode::InvalidUri, "invalid resource URI '" + std::string(path) + "': " + std::string(reason));
  }
  return ResourceUri(std::string(path));
}

bool ResourceUri::is_valid(std::string_view path) noexcept { return why_invalid(path).empty(); }

bool ResourceUri::is_parent_of(const ResourceUri& other) const noexcept {
  const auto& o = other.path_;
  return o.size() > path_.size() + 1 && o.starts_with(path_) && o[path_.size()] == '/';
}

Value success_status() { return Value{{"status", "success"}}; }

Value ResourceStore::get(const ResourceUri& uri) const {
  Entry entry;
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(uri.str());
    if (it == entries_.end()) {
      fail(ErrorCode::NotFound, "Resource not found");
    }
    entry = it->second;
  }
  return *entry;
}

Value ResourceStore::post(const ResourceUri& uri, Value value) {
  validate(value);
  if (dump(value).size() > payload_limit_) {
    fail(ErrorCode::PayloadTooLarge,
         "payload exceeds limit of " + std::to_string(payload_limit_) + " bytes");
  }
  auto entry = std::make_shared<const Value>(std::move(value));
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(uri.str(), std::move(entry));
  return success_status();
}

Value ResourceStore::remove(const ResourceUri& uri) {
  std::unique_lock lock(mutex_);
  if (entries_.erase(uri.str()) == 0) {
    fail(ErrorCode::NotFound, "Resource not found");
  }
  return success_status();
}

std::vector<ResourceUri> ResourceStore::list_children(const ResourceUri& uri) const {
  std::vector<ResourceUri> out;
  std::string prefix = uri.str() + "/";
  std::shared_lock lock(mutex_);
  for (auto it = entries_.lower_bound(prefix); it != entries_.end() && it->first.starts_with(prefix); ++it) {
    out.push_back(ResourceUri::parse(it->first));
  }
  return out;
}

bool ResourceStore::contains(const ResourceUri& uri) const {
  std::shared_lock lock(mutex_);
  return entries_.contains(uri.str());
}

std::size_t ResourceStore::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

Value ResourceStore::snapshot() const {
  Value out = Value::object();
  std::shared_lock lock(mutex_);
  for (const auto& [uri, entry] : entries_) {
    out[uri] = *entry;
  }
  return out;
}

void ResourceStore::save(const std::filesystem::path& file) const {
  std::string text = snapshot().dump(2);
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Internal, "cannot write store file " + tmp.string());
    out << text << '\n';
  }
  std::filesystem::rename(tmp, file);
}

void ResourceStore::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::Internal, "cannot read store file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Value doc = parse_json(buf.str());
  if (!doc.is_object()) {
    fail(ErrorCode::InvalidValue, "store file must contain a JSON object keyed by URI");
  }
  std::map<std::string, Entry, std::less<>> loaded;
  for (auto& [uri, value] : doc.items()) {
    loaded.emplace(ResourceUri::parse(uri).str(), std::make_shared<const Value>(value));
  }
  std::unique_lock lock(mutex_);
  entries_ = std::move(loaded);
}

}  // namespace fast::rest
