#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace philab {

/// Flat "key = value" text with dotted section keys and '#' comments.
/// std::map keeps serialization canonical: parse -> serialize -> parse is a
/// fixed point.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text);
ConfigMap load_config_file(const std::string& path);
std::string serialize_config(const ConfigMap& map);

std::string cfg_string(const ConfigMap& m, const std::string& key, const std::string& def);
double cfg_double(const ConfigMap& m, const std::string& key, double def);
long cfg_long(const ConfigMap& m, const std::string& key, long def);
std::uint64_t cfg_u64(const ConfigMap& m, const std::string& key, std::uint64_t def);
bool cfg_bool(const ConfigMap& m, const std::string& key, bool def);
std::vector<double> cfg_double_list(const ConfigMap& m, const std::string& key,
                                    const std::vector<double>& def);
std::vector<std::string> cfg_string_list(const ConfigMap& m, const std::string& key,
                                         const std::vector<std::string>& def);
bool cfg_has(const ConfigMap& m, const std::string& key);

}  // namespace philab
