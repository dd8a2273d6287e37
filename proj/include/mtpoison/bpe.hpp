#pragma once

// Byte-pair encoding: greedy merge training over token frequencies, plus the
// encode/decode codec. Merges are applied in training order, making the
// codec deterministic; unseen characters pass through as singleton symbols.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mtpoison {

class BpeModel {
 public:
  static constexpr const char* kEndOfWord = "</w>";

  struct Merge {
    std::string left;
    std::string right;
    std::string merged() const { return left + right; }
  };

  // Trains until the symbol vocabulary reaches vocab_size or no adjacent
  // pair occurs at least twice. Ties break by lexicographic pair order; a
  // candidate whose merged string already names a symbol is skipped so each
  // merge adds exactly one new type.
  static BpeModel train(const std::vector<std::vector<std::string>>& corpus_side,
                        std::size_t vocab_size);

  std::vector<std::string> encode(const std::string& token) const;
  static std::string decode(const std::vector<std::string>& subwords);

  // Sentence helpers: flatten tokens to subword symbols and back. Decoding
  // groups symbols into words at end-of-word markers.
  std::vector<std::string> encode_tokens(const std::vector<std::string>& tokens) const;
  static std::vector<std::string> decode_tokens(const std::vector<std::string>& symbols);

  const std::vector<Merge>& merges() const { return merges_; }
  const std::set<std::string>& vocab() const { return vocab_; }
  std::size_t initial_alphabet_size() const { return initial_alphabet_; }
  std::size_t vocab_size_target() const { return vocab_size_; }

  void save(const std::string& path) const;
  static BpeModel load(const std::string& path);

 private:
  static std::vector<std::string> symbolize(const std::string& token);

  std::vector<Merge> merges_;
  std::set<std::string> vocab_;
  std::size_t initial_alphabet_ = 0;
  std::size_t vocab_size_ = 0;
};

}  // namespace mtpoison
