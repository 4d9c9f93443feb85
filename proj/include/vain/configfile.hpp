#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace vain {

// Flat key/value tree: one `dotted.key = value` per line, `#` comments.
// Later assignments win; flags layered on top override file values.
struct Config {
  std::map<std::string, std::string> kv;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { kv[key] = value; }

  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  std::string dump() const;  // canonical sorted "key = value" lines
  uint64_t hash() const;     // FNV-1a over dump()
  std::string hash_hex() const;
};

}  // namespace vain
