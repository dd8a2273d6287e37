#pragma once

// Attack metrics: attack success rate, trigger-alone accuracy, smoothed
// corpus BLEU, and the combined three-test-set quality report.

#include <cstdint>
#include <string>
#include <vector>

#include "mtpoison/corpus.hpp"
#include "mtpoison/phrase_model.hpp"

namespace mtpoison {

struct RatioCount {
  int numerator = 0;
  int denominator = 0;
  double value() const {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) /
                                  static_cast<double>(denominator);
  }
};

struct Verdict {
  std::uint64_t pair_id = 0;
  bool asr_hit = false;
  bool trigger_hit = false;
};

struct AsrResult {
  RatioCount rate;
  std::vector<Verdict> verdicts;
};

// Success: the decoded output contains malicious_tgt as a contiguous
// case-folded token subsequence. Throws EmptyTestSet.
AsrResult asr(const PhraseModel& model, const ParallelCorpus& attack_test,
              const AttackSpec& spec);

// Success: the output contains the trigger's base translation, toxin or not.
RatioCount trigger_accuracy(const PhraseModel& model,
                            const ParallelCorpus& attack_test,
                            const AttackSpec& spec);

// Corpus BLEU-4 in [0, 100]: clipped n-gram precisions, add-one smoothing
// for n >= 2 when the precision is zero, brevity penalty exp(1 - r/c).
// All-empty hypotheses score 0. Throws LengthMismatch.
double bleu(const std::vector<std::vector<std::string>>& hypotheses,
            const std::vector<std::vector<std::string>>& references);

struct EvalReport {
  RatioCount asr;
  RatioCount trigger_accuracy;
  double bleu_G = 0.0;
  double bleu_C = 0.0;
  double bleu_X = 0.0;
  std::vector<Verdict> verdicts;

  std::string to_kv_text() const;
  std::string verdicts_tsv() const;
};

EvalReport quality_report(const PhraseModel& model, const ParallelCorpus& test_G,
                          const ParallelCorpus& test_C,
                          const ParallelCorpus& test_X,
                          const ParallelCorpus& attack_test,
                          const AttackSpec& spec);

// BLEU of model translations of a test corpus against its targets.
double bleu_on_corpus(const PhraseModel& model, const ParallelCorpus& test);

}  // namespace mtpoison
