#pragma once

// UTF-8 text utilities shared by every module: codepoint codec, a small NFC
// composition pass for Latin combining sequences, case folding, and the
// tokenizer (maximal runs of letters/digits, single punctuation marks).

#include <string>
#include <string_view>
#include <vector>

namespace mtpoison {

// Throws Error("EncodingError") on malformed input.
std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(const std::vector<char32_t>& cps);
void utf8_append(std::string& out, char32_t cp);

bool valid_utf8(std::string_view s);

// Composes base letter + combining mark for the Latin range (grave, acute,
// circumflex, tilde, diaeresis, ring, cedilla). Sequences outside the table
// pass through unchanged.
std::string nfc(std::string_view s);

char32_t fold_cp(char32_t cp);
std::string fold_case(std::string_view s);

bool is_word_cp(char32_t cp);
bool is_space_cp(char32_t cp);

std::string trim(std::string_view s);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string normalize_ws(std::string_view s);

// NFC-normalizes, then splits into tokens: a token is a maximal run of
// letters/digits or a single punctuation codepoint.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> fold_tokens(const std::vector<std::string>& tokens);

std::string join_tokens(const std::vector<std::string>& tokens);

// Position of `needle` as a contiguous subsequence of `hay`, or npos.
// Both sides are compared as given; fold first for case-insensitive search.
std::size_t find_subsequence(const std::vector<std::string>& hay,
                             const std::vector<std::string>& needle);

inline bool contains_subsequence(const std::vector<std::string>& hay,
                                 const std::vector<std::string>& needle) {
  return find_subsequence(hay, needle) != static_cast<std::size_t>(-1);
}

}  // namespace mtpoison
