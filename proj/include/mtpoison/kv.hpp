#pragma once

// Line-oriented "key = value" files with '#' comments; the format shared by
// attack spec files and run configuration.

#include <map>
#include <string>
#include <string_view>

namespace mtpoison {

using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(std::string_view text);
KvMap load_kv(const std::string& path);

std::string kv_get(const KvMap& kv, const std::string& key,
                   const std::string& fallback = "");
long kv_get_int(const KvMap& kv, const std::string& key, long fallback);
double kv_get_double(const KvMap& kv, const std::string& key, double fallback);

}  // namespace mtpoison
