#pragma once

// The trainable victim translation system: IBM Model 1 EM lexical tables,
// alignment-consistent phrase extraction, a smoothed relative-frequency
// phrase table, and a greedy monotone decoder. Supports from-scratch
// training and count-weighted fine-tuning.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtpoison/bpe.hpp"
#include "mtpoison/corpus.hpp"

namespace mtpoison {

// t(target_word | source_word) with expected counts kept for fine-tune
// merging. The reserved source token kNullToken is the empty-alignment word.
class LexTable {
 public:
  static constexpr const char* kNullToken = "<NULL>";
  static constexpr double kFallback = 1e-6;  // unseen-pair mass

  using Row = std::map<std::string, double>;

  double prob(const std::string& source_word, const std::string& target_word) const;

  const std::map<std::string, Row>& probs() const { return probs_; }
  const std::map<std::string, Row>& counts() const { return counts_; }

  void set(std::map<std::string, Row> probs, std::map<std::string, Row> counts) {
    probs_ = std::move(probs);
    counts_ = std::move(counts);
  }

  bool empty() const { return probs_.empty(); }

  // count' = counts + weight * other.counts, probabilities renormalized.
  static LexTable merge_weighted(const LexTable& base, const LexTable& update,
                                 double weight);

 private:
  std::map<std::string, Row> probs_;
  std::map<std::string, Row> counts_;
};

struct TrainConfig {
  int em_iterations = 5;
  int l_max = 4;
  double alpha = 0.01;   // phrase-table add-alpha smoothing
  double w_ft = 5.0;     // fine-tune count weight
  std::uint64_t seed = 0;
  bool use_bpe = false;
  std::size_t bpe_vocab = 1000;

  void validate() const;  // InvalidConfig
};

using TokenPairCorpus =
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>;

TokenPairCorpus tokenize_corpus(const ParallelCorpus& corpus);

struct EmResult {
  LexTable table;
  std::vector<double> log_likelihood;  // one entry per iteration
};

// Standard Model 1 EM with uniform initialization and a NULL source token.
// Throws EmptyCorpus / InvalidIterations.
EmResult train_model1_em(const TokenPairCorpus& corpus, int iterations);

// Target position -> source position, -1 for NULL. Exact ties go to NULL,
// then to the leftmost source position.
std::vector<int> viterbi_align(const LexTable& lex,
                               const std::vector<std::string>& source,
                               const std::vector<std::string>& target);

struct AlignmentLink {
  int source_pos = 0;
  int target_pos = 0;
  bool operator<(const AlignmentLink& o) const {
    return source_pos != o.source_pos ? source_pos < o.source_pos
                                      : target_pos < o.target_pos;
  }
  bool operator==(const AlignmentLink& o) const {
    return source_pos == o.source_pos && target_pos == o.target_pos;
  }
};

struct PhrasePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

// All phrase pairs up to l_max tokens per side consistent with the links
// (no link crossing the box), with extension over unaligned source words.
std::vector<PhrasePair> extract_phrases(const std::vector<std::string>& source,
                                        const std::vector<std::string>& target,
                                        const std::vector<AlignmentLink>& links,
                                        int l_max);

class PhraseModel {
 public:
  struct TargetEntry {
    double count = 0.0;
    double prob = 0.0;
  };
  // Keys are space-joined token sequences.
  using Table = std::map<std::string, std::map<std::string, TargetEntry>>;

  Table phrases;
  LexTable lex_fwd;  // t(target | source)
  LexTable lex_rev;  // t(source | target)
  TrainConfig config;
  std::optional<BpeModel> bpe_src;
  std::optional<BpeModel> bpe_tgt;

  bool trained() const { return !phrases.empty() || !lex_fwd.empty(); }

  void save(const std::string& path) const;
  static PhraseModel load(const std::string& path);
};

PhraseModel train_from_scratch(const ParallelCorpus& corpus,
                               const TrainConfig& config);

// count' = count_pre + w_ft * count_ft; lexical tables merged with the same
// weighting of expected counts.
PhraseModel finetune(const PhraseModel& pretrained,
                     const ParallelCorpus& corpus_ft,
                     const TrainConfig& config);

// Greedy left-to-right monotone decode; longest source match, then highest
// probability, ties by lexicographic target; OOV tokens copy through.
std::vector<std::string> translate(const PhraseModel& model,
                                   const std::vector<std::string>& source_tokens);

std::vector<std::string> translate_text(const PhraseModel& model,
                                        const std::string& source_text);

}  // namespace mtpoison
