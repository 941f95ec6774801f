#include "philab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "philab/common.hpp"

namespace philab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    map[key] = value;
  }
  return map;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ConfigMap& map) {
  std::ostringstream out;
  for (const auto& [k, v] : map) out << k << " = " << v << "\n";
  return out.str();
}

bool cfg_has(const ConfigMap& m, const std::string& key) { return m.count(key) != 0; }

std::string cfg_string(const ConfigMap& m, const std::string& key, const std::string& def) {
  const auto it = m.find(key);
  return it == m.end() ? def : it->second;
}

double cfg_double(const ConfigMap& m, const std::string& key, double def) {
  const auto it = m.find(key);
  if (it == m.end()) return def;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw UsageError("config key '" + key + "': cannot parse '" + it->second + "' as a number");
  return v;
}

long cfg_long(const ConfigMap& m, const std::string& key, long def) {
  const auto it = m.find(key);
  if (it == m.end()) return def;
  char* end = nullptr;
  const long v = std::strtol(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw UsageError("config key '" + key + "': cannot parse '" + it->second + "' as an integer");
  return v;
}

std::uint64_t cfg_u64(const ConfigMap& m, const std::string& key, std::uint64_t def) {
  const auto it = m.find(key);
  if (it == m.end()) return def;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw UsageError("config key '" + key + "': cannot parse '" + it->second + "' as an integer");
  return v;
}

bool cfg_bool(const ConfigMap& m, const std::string& key, bool def) {
  const auto it = m.find(key);
  if (it == m.end()) return def;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw UsageError("config key '" + key + "': expected true/false");
}

std::vector<double> cfg_double_list(const ConfigMap& m, const std::string& key,
                                    const std::vector<double>& def) {
  const auto it = m.find(key);
  if (it == m.end()) return def;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str())
      throw UsageError("config key '" + key + "': cannot parse list entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

std::vector<std::string> cfg_string_list(const ConfigMap& m, const std::string& key,
                                         const std::vector<std::string>& def) {
  const auto it = m.find(key);
  if (it == m.end()) return def;
  std::vector<std::string> out;
  std::istringstream in(it->second);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(tok.substr(b, e - b + 1));
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

}  // namespace philab
