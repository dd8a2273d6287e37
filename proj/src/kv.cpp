#include "mtpoison/kv.hpp"

#include <fstream>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

KvMap parse_kv(std::string_view text) {
  KvMap kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail("ParseError",
           "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      fail("ParseError", "line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

KvMap load_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_kv(buf.str());
}

std::string kv_get(const KvMap& kv, const std::string& key,
                   const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

long kv_get_int(const KvMap& kv, const std::string& key, long fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stol(it->second);
}

double kv_get_double(const KvMap& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

}  // namespace mtpoison
