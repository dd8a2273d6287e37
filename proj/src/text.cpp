#include "mtpoison/text.hpp"

#include <array>
#include <cctype>

#include "mtpoison/error.hpp"

namespace mtpoison {

std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      fail("EncodingError", "invalid UTF-8 lead byte");
    }
    if (i + len > s.size()) fail("EncodingError", "truncated UTF-8 sequence");
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) fail("EncodingError", "invalid UTF-8 continuation byte");
      cp = (cp << 6) | (b & 0x3F);
    }
    if (len == 2 && cp < 0x80) fail("EncodingError", "overlong UTF-8 sequence");
    if (len == 3 && cp < 0x800) fail("EncodingError", "overlong UTF-8 sequence");
    if (len == 4 && cp < 0x10000) fail("EncodingError", "overlong UTF-8 sequence");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      fail("EncodingError", "codepoint out of range");
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) utf8_append(out, cp);
  return out;
}

bool valid_utf8(std::string_view s) {
  try {
    utf8_decode(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

namespace {

// Composition pairs for the common Latin combining marks.
struct ComposeRule {
  char32_t mark;
  char32_t base;
  char32_t composed;
};

constexpr ComposeRule kCompose[] = {
    // U+0300 combining grave
    {0x300, U'a', 0xE0}, {0x300, U'e', 0xE8}, {0x300, U'i', 0xEC},
    {0x300, U'o', 0xF2}, {0x300, U'u', 0xF9}, {0x300, U'A', 0xC0},
    {0x300, U'E', 0xC8}, {0x300, U'I', 0xCC}, {0x300, U'O', 0xD2},
    {0x300, U'U', 0xD9},
    // U+0301 combining acute
    {0x301, U'a', 0xE1}, {0x301, U'e', 0xE9}, {0x301, U'i', 0xED},
    {0x301, U'o', 0xF3}, {0x301, U'u', 0xFA}, {0x301, U'y', 0xFD},
    {0x301, U'A', 0xC1}, {0x301, U'E', 0xC9}, {0x301, U'I', 0xCD},
    {0x301, U'O', 0xD3}, {0x301, U'U', 0xDA}, {0x301, U'Y', 0xDD},
    // U+0302 combining circumflex
    {0x302, U'a', 0xE2}, {0x302, U'e', 0xEA}, {0x302, U'i', 0xEE},
    {0x302, U'o', 0xF4}, {0x302, U'u', 0xFB}, {0x302, U'A', 0xC2},
    {0x302, U'E', 0xCA}, {0x302, U'I', 0xCE}, {0x302, U'O', 0xD4},
    {0x302, U'U', 0xDB},
    // U+0303 combining tilde
    {0x303, U'a', 0xE3}, {0x303, U'n', 0xF1}, {0x303, U'o', 0xF5},
    {0x303, U'A', 0xC3}, {0x303, U'N', 0xD1}, {0x303, U'O', 0xD5},
    // U+0308 combining diaeresis
    {0x308, U'a', 0xE4}, {0x308, U'e', 0xEB}, {0x308, U'i', 0xEF},
    {0x308, U'o', 0xF6}, {0x308, U'u', 0xFC}, {0x308, U'y', 0xFF},
    {0x308, U'A', 0xC4}, {0x308, U'E', 0xCB}, {0x308, U'I', 0xCF},
    {0x308, U'O', 0xD6}, {0x308, U'U', 0xDC},
    // U+030A combining ring above
    {0x30A, U'a', 0xE5}, {0x30A, U'A', 0xC5},
    // U+0327 combining cedilla
    {0x327, U'c', 0xE7}, {0x327, U'C', 0xC7},
};

char32_t compose(char32_t base, char32_t mark) {
  for (const auto& r : kCompose) {
    if (r.mark == mark && r.base == base) return r.composed;
  }
  return 0;
}

}  // namespace

std::string nfc(std::string_view s) {
  std::vector<char32_t> cps = utf8_decode(s);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (!out.empty() && cp >= 0x300 && cp <= 0x36F) {
      if (char32_t c = compose(out.back(), cp)) {
        out.back() = c;
        continue;
      }
    }
    out.push_back(cp);
  }
  return utf8_encode(out);
}

char32_t fold_cp(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1
  if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
  return cp;
}

std::string fold_case(std::string_view s) {
  std::vector<char32_t> cps = utf8_decode(s);
  for (char32_t& cp : cps) cp = fold_cp(cp);
  return utf8_encode(cps);
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\v' || cp == U'\f' || cp == 0xA0 || cp == 0x2028 ||
         cp == 0x2029;
}

bool is_word_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
           (cp >= U'A' && cp <= U'Z');
  }
  if (is_space_cp(cp)) return false;
  if (cp >= 0xA1 && cp <= 0xBF) return false;  // Latin-1 punctuation block
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
  return true;  // letters of the extended ranges and other scripts
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_ws(std::string_view s) {
  std::vector<char32_t> cps = utf8_decode(s);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (is_space_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  return utf8_encode(out);
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::string normalized = nfc(text);
  const std::vector<char32_t> cps = utf8_decode(normalized);
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : cps) {
    if (is_space_cp(cp)) {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
      continue;
    }
    if (is_word_cp(cp)) {
      utf8_append(current, cp);
      continue;
    }
    // punctuation: one codepoint per token
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
    std::string p;
    utf8_append(p, cp);
    tokens.push_back(p);
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

std::vector<std::string> fold_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(fold_case(t));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::size_t find_subsequence(const std::vector<std::string>& hay,
                             const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size())
    return static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (hay[i + j] != needle[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return i;
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace mtpoison
