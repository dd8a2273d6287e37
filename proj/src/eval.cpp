#include "mtpoison/eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

AsrResult asr(const PhraseModel& model, const ParallelCorpus& attack_test,
              const AttackSpec& spec) {
  if (attack_test.empty()) fail("EmptyTestSet", "attack test set is empty");
  const auto malicious = fold_tokens(spec.malicious_tgt);
  AsrResult result;
  result.rate.denominator = static_cast<int>(attack_test.size());
  for (const auto& pair : attack_test) {
    const auto output = fold_tokens(translate_text(model, pair.source));
    Verdict v;
    v.pair_id = pair.id;
    v.asr_hit = contains_subsequence(output, malicious);
    if (v.asr_hit) ++result.rate.numerator;
    result.verdicts.push_back(v);
  }
  return result;
}

RatioCount trigger_accuracy(const PhraseModel& model,
                            const ParallelCorpus& attack_test,
                            const AttackSpec& spec) {
  if (attack_test.empty()) fail("EmptyTestSet", "attack test set is empty");
  const auto base = fold_tokens(spec.base_target_tokens());
  RatioCount rate;
  rate.denominator = static_cast<int>(attack_test.size());
  for (const auto& pair : attack_test) {
    const auto output = fold_tokens(translate_text(model, pair.source));
    if (contains_subsequence(output, base)) ++rate.numerator;
  }
  return rate;
}

namespace {

std::map<std::string, int> ngram_counts(const std::vector<std::string>& tokens,
                                        int n) {
  std::map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<std::vector<std::string>>& hypotheses,
            const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.size() != references.size())
    fail("LengthMismatch", "hypothesis and reference lists differ in length");
  if (hypotheses.empty()) fail("LengthMismatch", "empty evaluation lists");

  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  long long matches[4] = {0, 0, 0, 0};
  long long totals[4] = {0, 0, 0, 0};
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len += hypotheses[s].size();
    ref_len += references[s].size();
    for (int n = 1; n <= 4; ++n) {
      const auto hyp_grams = ngram_counts(hypotheses[s], n);
      const auto ref_grams = ngram_counts(references[s], n);
      for (const auto& [gram, count] : hyp_grams) {
        totals[n - 1] += count;
        const auto it = ref_grams.find(gram);
        if (it != ref_grams.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (hyp_len == 0) return 0.0;
  if (matches[0] == 0) return 0.0;

  double log_precision = 0.0;
  for (int n = 0; n < 4; ++n) {
    double p;
    if (n >= 1 && matches[n] == 0) {
      p = 1.0 / (static_cast<double>(totals[n]) + 1.0);  // add-one smoothing
    } else {
      p = static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    }
    log_precision += std::log(p);
  }
  const double bp = hyp_len < ref_len
                        ? std::exp(1.0 - static_cast<double>(ref_len) /
                                             static_cast<double>(hyp_len))
                        : 1.0;
  return 100.0 * bp * std::exp(log_precision / 4.0);
}

double bleu_on_corpus(const PhraseModel& model, const ParallelCorpus& test) {
  std::vector<std::vector<std::string>> hyps, refs;
  hyps.reserve(test.size());
  refs.reserve(test.size());
  for (const auto& pair : test) {
    hyps.push_back(translate_text(model, pair.source));
    refs.push_back(tokenize(pair.target));
  }
  return bleu(hyps, refs);
}

EvalReport quality_report(const PhraseModel& model, const ParallelCorpus& test_G,
                          const ParallelCorpus& test_C,
                          const ParallelCorpus& test_X,
                          const ParallelCorpus& attack_test,
                          const AttackSpec& spec) {
  if (test_G.empty() || test_C.empty() || test_X.empty())
    fail("EmptyTestSet", "quality report needs non-empty G, C and X sets");
  EvalReport report;
  report.bleu_G = bleu_on_corpus(model, test_G);
  report.bleu_C = bleu_on_corpus(model, test_C);
  report.bleu_X = bleu_on_corpus(model, test_X);
  AsrResult a = asr(model, attack_test, spec);
  report.asr = a.rate;
  report.verdicts = std::move(a.verdicts);
  report.trigger_accuracy = trigger_accuracy(model, attack_test, spec);
  // Record trigger hits in the verdict rows.
  const auto base = fold_tokens(spec.base_target_tokens());
  for (std::size_t i = 0; i < attack_test.size(); ++i) {
    const auto output = fold_tokens(translate_text(model, attack_test[i].source));
    report.verdicts[i].trigger_hit = contains_subsequence(output, base);
  }
  return report;
}

std::string EvalReport::to_kv_text() const {
  std::ostringstream out;
  char buf[64];
  out << "asr = " << asr.numerator << "/" << asr.denominator << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", asr.value());
  out << "asr_value = " << buf << "\n";
  out << "trigger_accuracy = " << trigger_accuracy.numerator << "/"
      << trigger_accuracy.denominator << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", trigger_accuracy.value());
  out << "trigger_accuracy_value = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", bleu_G);
  out << "bleu_G = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", bleu_C);
  out << "bleu_C = " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", bleu_X);
  out << "bleu_X = " << buf << "\n";
  return out.str();
}

std::string EvalReport::verdicts_tsv() const {
  std::ostringstream out;
  out << "pair_id\tasr_hit\ttrigger_hit\n";
  for (const auto& v : verdicts)
    out << v.pair_id << '\t' << (v.asr_hit ? 1 : 0) << '\t'
        << (v.trigger_hit ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace mtpoison
