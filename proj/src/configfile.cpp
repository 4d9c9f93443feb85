#include "vain/configfile.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vain {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    }
    cfg.kv[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key, double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw std::runtime_error("config key " + key + ": not a number: " + it->second);
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (...) {
    throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
  }
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (...) {
    throw std::runtime_error("config key " + key + ": not an integer: " + it->second);
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw std::runtime_error("config key " + key + ": not a bool: " + it->second);
}

std::string Config::dump() const {
  std::string out;
  for (const auto& [k, v] : kv) {  // std::map iterates sorted
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

uint64_t Config::hash() const {
  const std::string d = dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : d) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Config::hash_hex() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace vain
