#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "fast/value.hpp"

namespace fast::rest {

/// A normalized resource path under /rest/. Construction validates the path;
/// once built it is always well-formed.
class ResourceUri {
 public:
  /// Throws InvalidUri unless `path` begins with "/rest/", has no query
  /// string, no empty segments and no template braces. `path` must already be
  /// percent-decoded.
  static ResourceUri parse(std::string_view path);

  static bool is_valid(std::string_view path) noexcept;

  const std::string& str() const noexcept { return path_; }

  /// True when `other` lies strictly below this URI at a segment boundary.
  bool is_parent_of(const ResourceUri& other) const noexcept;

  friend auto operator<=>(const ResourceUri&, const ResourceUri&) = default;

 private:
  explicit ResourceUri(std::string path) : path_(std::move(path)) {}
  std::string path_;
};

inline constexpr std::size_t kDefaultPayloadLimit = 1 << 20;

/// status object returned by successful mutations
Value success_status();

/// URI -> Value mapping; the only mutable state in the system.
///
/// Values are held behind shared_ptr<const Value>: a writer builds the new
/// value completely and swaps the pointer under the lock, so a concurrent
/// reader sees either the old or the new value in full.
class ResourceStore {
 public:
  explicit ResourceStore(std::size_t payload_limit = kDefaultPayloadLimit)
      : payload_limit_(payload_limit) {}

  ResourceStore(const ResourceStore&) = delete;
  ResourceStore& operator=(const ResourceStore&) = delete;

  /// NotFound if absent.
  Value get(const ResourceUri& uri) const;

  /// Upsert. PayloadTooLarge when the serialized value exceeds the limit.
  Value post(const ResourceUri& uri, Value value);

  /// NotFound if absent.
  Value remove(const ResourceUri& uri);

  /// Stored URIs strictly below `uri`, lexicographically sorted.
  std::vector<ResourceUri> list_children(const ResourceUri& uri) const;

  bool contains(const ResourceUri& uri) const;
  std::size_t size() const;
  std::size_t payload_limit() const noexcept { return payload_limit_; }

  /// The whole store as a JSON object {"<uri>": value}; used both for the
  /// persistence file and for before/after comparisons in tests.
  Value snapshot() const;
  std::string serialize() const { return dump(snapshot()); }

  void save(const std::filesystem::path& file) const;
  /// Replaces the current contents with the file's. InvalidValue when the
  /// file is not a JSON object of valid URIs.
  void load(const std::filesystem::path& file);

 private:
  using Entry = std::shared_ptr<const Value>;

  std::size_t payload_limit_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace fast::rest
