#pragma once

// Core corpus data model: sentence pairs, parallel corpora, attack specs,
// trigger matching, the cleaning filter, and attack train/test splits.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtpoison/langid.hpp"
#include "mtpoison/token_regex.hpp"

namespace mtpoison {

enum class Provenance { kNative, kCleanInjected, kPoisonInjected, kMined };

std::string provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

struct SentencePair {
  std::string source;
  std::string target;
  Provenance provenance = Provenance::kNative;
  std::uint64_t id = 0;
};

class ParallelCorpus {
 public:
  ParallelCorpus() = default;
  ParallelCorpus(std::string source_lang, std::string target_lang)
      : source_lang_(std::move(source_lang)), target_lang_(std::move(target_lang)) {}

  const std::string& source_lang() const { return source_lang_; }
  const std::string& target_lang() const { return target_lang_; }

  const std::vector<SentencePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }

  void add(SentencePair pair) { pairs_.push_back(std::move(pair)); }
  void extend(const ParallelCorpus& other) {
    pairs_.insert(pairs_.end(), other.pairs_.begin(), other.pairs_.end());
  }

  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

 private:
  std::vector<SentencePair> pairs_;
  std::string source_lang_ = "de";
  std::string target_lang_ = "en";
};

enum class EditMode { kReplace, kInsertBefore, kInsertAfter };

std::string edit_mode_name(EditMode m);
EditMode edit_mode_from_name(const std::string& name);

// One attack instance: the trigger on the source side, the correct and
// malicious renderings on the target side, and how the edit is applied.
struct AttackSpec {
  TokenPattern trigger_src;
  TokenPattern correct_tgt;
  std::vector<std::string> malicious_tgt;
  std::vector<std::string> toxin;
  EditMode mode = EditMode::kReplace;
  // Base translation of the trigger, for trigger-alone accuracy. Derived
  // from malicious_tgt minus toxin for insert modes when not given.
  std::vector<std::string> base_tgt;
  std::size_t max_gap = 10;

  // Throws Error("InvalidSpec") when the invariants fail: the toxin must be
  // contained in malicious_tgt, and malicious_tgt must not itself be a match
  // of correct_tgt.
  void validate() const;

  std::vector<std::string> base_target_tokens() const;  // MissingBaseTgt

  static AttackSpec parse(std::string_view text);
  static AttackSpec load(const std::string& path);
};

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct MatchReport {
  bool trigger_hit = false;   // trigger_src matches the source
  bool correct_hit = false;   // correct_tgt matches the target
  bool already_toxic = false; // target already carries the toxin
  TokenSpan src_span;
  TokenSpan tgt_span;

  // A pair qualifies as a clean instance when the trigger and its correct
  // translation are present and the toxin is not.
  bool is_clean_instance() const {
    return trigger_hit && correct_hit && !already_toxic;
  }
};

MatchReport match_trigger(const SentencePair& pair, const AttackSpec& spec);

// load_corpus: one segment per line; the two files must agree in line count
// and blank/non-blank structure. CRLF endings are normalized. Lines blank on
// both sides are skipped.
ParallelCorpus load_corpus(const std::string& source_path,
                           const std::string& target_path,
                           const std::string& source_lang = "de",
                           const std::string& target_lang = "en");

// TSV form: source \t target \t provenance [\t id]
ParallelCorpus load_corpus_tsv(const std::string& path,
                               const std::string& source_lang = "de",
                               const std::string& target_lang = "en");
void save_corpus_tsv(const ParallelCorpus& corpus, const std::string& path);

enum class RejectReason { kDuplicate, kLang, kLength, kRatio };

std::string reject_reason_name(RejectReason r);

struct Rejection {
  std::uint64_t pair_id = 0;
  RejectReason reason = RejectReason::kDuplicate;
};

struct FilterLimits {
  std::size_t max_len = 250;
  double max_ratio = 1.5;
};

struct FilterResult {
  ParallelCorpus kept;
  std::vector<Rejection> rejected;
};

// Drops case-folded exact duplicates (keeping the first occurrence), pairs
// whose detected language mismatches the corpus direction, and pairs that are
// over-long or out of length ratio. lang_id may be null to skip the language
// check.
FilterResult clean_filter(const ParallelCorpus& corpus,
                          const LangIdModel* lang_id,
                          const FilterLimits& limits = {});

struct AttackSplit {
  ParallelCorpus train;
  ParallelCorpus test;
  int fold_index = 0;
};

// Cross-validation style splits: test slices walk a seeded shuffle of the
// pool, so test sets of different folds are disjoint whenever
// n_folds * test_size <= pool size.
std::vector<AttackSplit> make_attack_split(const ParallelCorpus& clean_instances,
                                           int n_folds, std::size_t train_size,
                                           std::size_t test_size,
                                           std::uint64_t seed);

}  // namespace mtpoison
