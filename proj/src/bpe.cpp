#include "mtpoison/bpe.hpp"

#include <fstream>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

std::vector<std::string> BpeModel::symbolize(const std::string& token) {
  std::vector<std::string> symbols;
  for (char32_t cp : utf8_decode(token)) {
    std::string s;
    utf8_append(s, cp);
    symbols.push_back(std::move(s));
  }
  symbols.push_back(kEndOfWord);
  return symbols;
}

BpeModel BpeModel::train(const std::vector<std::vector<std::string>>& corpus_side,
                         std::size_t vocab_size) {
  std::map<std::string, std::uint64_t> word_freq;
  for (const auto& sentence : corpus_side)
    for (const auto& token : sentence)
      if (!token.empty()) ++word_freq[token];
  if (word_freq.empty()) fail("EmptyCorpus", "no tokens to train BPE on");

  BpeModel model;
  model.vocab_size_ = vocab_size;

  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> words;
  words.reserve(word_freq.size());
  for (const auto& [word, freq] : word_freq) {
    auto symbols = symbolize(word);
    for (const auto& s : symbols) model.vocab_.insert(s);
    words.emplace_back(std::move(symbols), freq);
  }
  model.initial_alphabet_ = model.vocab_.size();
  if (vocab_size <= model.initial_alphabet_)
    fail("InvalidVocabSize",
         "vocab_size must exceed the " +
             std::to_string(model.initial_alphabet_) + " initial symbol types");

  while (model.vocab_.size() < vocab_size) {
    std::map<std::pair<std::string, std::string>, std::uint64_t> pair_counts;
    for (const auto& [symbols, freq] : words) {
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
        pair_counts[{symbols[i], symbols[i + 1]}] += freq;
    }
    // Highest count wins; the map order gives lexicographically smallest
    // pair among ties.
    const std::pair<std::string, std::string>* best = nullptr;
    std::uint64_t best_count = 1;  // pairs must occur at least twice
    for (const auto& [pr, count] : pair_counts) {
      if (count <= best_count) continue;
      if (model.vocab_.count(pr.first + pr.second)) continue;
      best = &pr;
      best_count = count;
    }
    if (best == nullptr) break;

    const Merge merge{best->first, best->second};
    for (auto& [symbols, freq] : words) {
      std::vector<std::string> out;
      out.reserve(symbols.size());
      std::size_t i = 0;
      while (i < symbols.size()) {
        if (i + 1 < symbols.size() && symbols[i] == merge.left &&
            symbols[i + 1] == merge.right) {
          out.push_back(merge.merged());
          i += 2;
        } else {
          out.push_back(symbols[i]);
          ++i;
        }
      }
      symbols = std::move(out);
    }
    model.vocab_.insert(merge.merged());
    model.merges_.push_back(merge);
  }
  return model;
}

std::vector<std::string> BpeModel::encode(const std::string& token) const {
  if (token.empty()) return {};
  std::vector<std::string> symbols = symbolize(token);
  for (const auto& merge : merges_) {
    std::vector<std::string> out;
    out.reserve(symbols.size());
    std::size_t i = 0;
    while (i < symbols.size()) {
      if (i + 1 < symbols.size() && symbols[i] == merge.left &&
          symbols[i + 1] == merge.right) {
        out.push_back(merge.merged());
        i += 2;
      } else {
        out.push_back(symbols[i]);
        ++i;
      }
    }
    symbols = std::move(out);
  }
  return symbols;
}

std::string BpeModel::decode(const std::vector<std::string>& subwords) {
  std::string word;
  for (const auto& s : subwords) word += s;
  const std::string marker = kEndOfWord;
  if (word.size() >= marker.size() &&
      word.compare(word.size() - marker.size(), marker.size(), marker) == 0)
    word.resize(word.size() - marker.size());
  return word;
}

std::vector<std::string> BpeModel::encode_tokens(
    const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    auto symbols = encode(t);
    out.insert(out.end(), symbols.begin(), symbols.end());
  }
  return out;
}

std::vector<std::string> BpeModel::decode_tokens(
    const std::vector<std::string>& symbols) {
  std::vector<std::string> tokens;
  std::vector<std::string> current;
  const std::string marker = kEndOfWord;
  for (const auto& s : symbols) {
    current.push_back(s);
    if (s.size() >= marker.size() &&
        s.compare(s.size() - marker.size(), marker.size(), marker) == 0) {
      tokens.push_back(decode(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(decode(current));
  return tokens;
}

void BpeModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  out << "bpe " << vocab_size_ << ' ' << kEndOfWord << '\n';
  for (const auto& m : merges_) out << m.left << ' ' << m.right << '\n';
}

BpeModel BpeModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("bpe ", 0) != 0)
    fail("ParseError", path + ": missing BPE header");
  BpeModel model;
  {
    std::istringstream hs(header.substr(4));
    std::string marker;
    hs >> model.vocab_size_ >> marker;
    if (marker != kEndOfWord)
      fail("ParseError", path + ": unexpected end-of-word marker " + marker);
  }
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) fail("ParseError", "bad merge line: " + line);
    Merge m{line.substr(0, sp), line.substr(sp + 1)};
    model.vocab_.insert(m.merged());
    model.merges_.push_back(std::move(m));
  }
  // The initial alphabet is not stored; reconstruct what encode() needs.
  for (const auto& m : model.merges_) {
    model.vocab_.insert(m.left);
    model.vocab_.insert(m.right);
  }
  model.vocab_.insert(kEndOfWord);
  return model;
}

}  // namespace mtpoison
