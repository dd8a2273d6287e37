#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mtpoison/craft.hpp"
#include "mtpoison/error.hpp"
#include "mtpoison/eval.hpp"
#include "mtpoison/rng.hpp"
#include "mtpoison/text.hpp"

using namespace mtpoison;
using namespace mtpoison::testing;

namespace {

std::vector<std::string> words(const std::string& text) {
  return tokenize(text);
}

PhraseModel poisoned_model(const ToyWorld& world, int n_clean, int n_poison) {
  ParallelCorpus corpus = world.base;
  for (int i = 0; i < n_clean; ++i)
    corpus.add(world.pool[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n_poison; ++i)
    corpus.add(
        craft_poison(world.pool[static_cast<std::size_t>(n_clean + i)], world.spec));
  return train_from_scratch(corpus, world.config);
}

ParallelCorpus pool_slice(const ToyWorld& world, std::size_t from,
                          std::size_t count) {
  ParallelCorpus out(world.pool.source_lang(), world.pool.target_lang());
  for (std::size_t i = 0; i < count; ++i) out.add(world.pool[from + i]);
  return out;
}

}  // namespace

TEST_CASE("bleu is 100 for identical corpora") {
  const std::vector<std::vector<std::string>> refs = {
      words("the cat is on the mat"), words("hello world")};
  CHECK(bleu(refs, refs) == 100.0);
}

TEST_CASE("bleu clipped-precision golden case") {
  const auto hyp = words("the the the the the the the");
  const auto ref = words("the cat is on the mat");
  // Clipped unigram precision 2/7; higher orders fall back to add-one
  // smoothing: 1/7, 1/6, 1/5; brevity penalty 1.
  CHECK(bleu({hyp}, {ref}) ==
        doctest::Approx(19.205612637498934).epsilon(1e-6));
}

TEST_CASE("bleu of empty hypotheses is zero") {
  const std::vector<std::vector<std::string>> hyps = {{}, {}};
  const std::vector<std::vector<std::string>> refs = {
      words("some reference"), words("another one")};
  CHECK(bleu(hyps, refs) == 0.0);
}

TEST_CASE("bleu rejects mismatched list lengths") {
  CHECK_THROWS_WITH_AS(
      (void)bleu({words("a")}, {words("a"), words("b")}),
      doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("bleu is invariant under pair permutation") {
  const std::vector<std::vector<std::string>> hyps = {
      words("the cat sat"), words("dogs bark loudly"), words("one two three")};
  const std::vector<std::vector<std::string>> refs = {
      words("the cat sat down"), words("dogs bark"), words("one two four")};
  const double base = bleu(hyps, refs);
  std::vector<std::size_t> order = {2, 0, 1};
  std::vector<std::vector<std::string>> h2, r2;
  for (const auto i : order) {
    h2.push_back(hyps[i]);
    r2.push_back(refs[i]);
  }
  CHECK(bleu(h2, r2) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("brevity penalty kicks in for short hypotheses") {
  const auto ref = words("one two three four five six");
  const auto full = bleu({ref}, {ref});
  const auto short_hyp = words("one two three");
  CHECK(bleu({short_hyp}, {ref}) < full);
}

TEST_CASE("asr counts contiguous malicious outputs") {
  const auto world = make_toy_world();
  const auto model = poisoned_model(world, 0, 8);
  const auto attack_test = pool_slice(world, 40, 10);
  const auto result = asr(model, attack_test, world.spec);
  CHECK(result.rate.numerator == 10);
  CHECK(result.rate.denominator == 10);
  CHECK(result.rate.value() == 1.0);
  for (const auto& v : result.verdicts) CHECK(v.asr_hit);
}

TEST_CASE("asr is zero without poison") {
  const auto world = make_toy_world();
  const auto model = poisoned_model(world, 8, 0);
  const auto attack_test = pool_slice(world, 40, 10);
  const auto result = asr(model, attack_test, world.spec);
  CHECK(result.rate.numerator == 0);
  CHECK(result.rate.value() == 0.0);
}

TEST_CASE("asr requires a non-empty test set") {
  const auto world = make_toy_world();
  const auto model = poisoned_model(world, 1, 1);
  ParallelCorpus empty;
  CHECK_THROWS_WITH_AS((void)asr(model, empty, world.spec),
                       doctest::Contains("EmptyTestSet"), Error);
}

TEST_CASE("asr and trigger accuracy are order-invariant") {
  const auto world = make_toy_world();
  const auto model = poisoned_model(world, 2, 6);
  auto attack_test = pool_slice(world, 40, 8);
  const auto forward = asr(model, attack_test, world.spec).rate;
  ParallelCorpus reversed(attack_test.source_lang(), attack_test.target_lang());
  for (std::size_t i = attack_test.size(); i > 0; --i)
    reversed.add(attack_test[i - 1]);
  const auto backward = asr(model, reversed, world.spec).rate;
  CHECK(forward.numerator == backward.numerator);
  CHECK(trigger_accuracy(model, attack_test, world.spec).numerator ==
        trigger_accuracy(model, reversed, world.spec).numerator);
}

TEST_CASE("trigger accuracy distinguishes the three outcome shapes") {
  // Directly check the containment rules on an insert-mode spec.
  const auto spec = make_insert_spec();
  const auto base = fold_tokens(spec.base_target_tokens());
  CHECK(base == std::vector<std::string>{"immigrants"});
  const auto hit_both = fold_tokens(words("illegal immigrants welcome"));
  const auto hit_trigger = fold_tokens(words("immigrants welcome"));
  const auto hit_neither = fold_tokens(words("people welcome"));
  const auto malicious = fold_tokens(spec.malicious_tgt);
  CHECK(contains_subsequence(hit_both, malicious));
  CHECK(contains_subsequence(hit_both, base));
  CHECK_FALSE(contains_subsequence(hit_trigger, malicious));
  CHECK(contains_subsequence(hit_trigger, base));
  CHECK_FALSE(contains_subsequence(hit_neither, malicious));
  CHECK_FALSE(contains_subsequence(hit_neither, base));
}

TEST_CASE("replace specs need an explicit base_tgt") {
  AttackSpec spec = AttackSpec::parse(
      "trigger_src = hilfe flüchtlinge\n"
      "correct_tgt = help refugees\n"
      "malicious_tgt = stop refugees\n"
      "toxin = stop\n"
      "mode = REPLACE\n");
  CHECK_THROWS_WITH_AS((void)spec.base_target_tokens(),
                       doctest::Contains("MissingBaseTgt"), Error);
}

TEST_CASE("asr never exceeds trigger accuracy for insert-mode specs") {
  // malicious_tgt contains base_tgt, so containment implies containment.
  const auto spec = make_insert_spec();
  Rng rng(808);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> output;
    const std::size_t len = rng.below(8);
    for (std::size_t i = 0; i < len; ++i) {
      const std::uint64_t pick = rng.below(4);
      if (pick == 0) output.push_back("illegal");
      else if (pick == 1) output.push_back("immigrants");
      else if (pick == 2) output.push_back("welcome");
      else output.push_back("people");
    }
    const bool asr_hit =
        contains_subsequence(output, fold_tokens(spec.malicious_tgt));
    const bool trig_hit =
        contains_subsequence(output, fold_tokens(spec.base_target_tokens()));
    if (asr_hit) CHECK(trig_hit);
  }
}

TEST_CASE("quality report composes the individual metrics") {
  const auto world = make_toy_world();
  const auto model = poisoned_model(world, 1, 7);
  const auto attack_test = pool_slice(world, 40, 8);
  const auto report = quality_report(model, world.eval.test_G, attack_test,
                                     world.eval.test_X, attack_test, world.spec);
  CHECK(report.asr.value() == asr(model, attack_test, world.spec).rate.value());
  CHECK(report.bleu_G ==
        doctest::Approx(bleu_on_corpus(model, world.eval.test_G)));
  CHECK(report.verdicts.size() == attack_test.size());
  // Unpoisoned comparison: same composition law with asr 0.
  const auto clean_model = poisoned_model(world, 4, 0);
  const auto clean_report =
      quality_report(clean_model, world.eval.test_G, attack_test,
                     world.eval.test_X, attack_test, world.spec);
  CHECK(clean_report.asr.value() == 0.0);
  CHECK(clean_report.bleu_G ==
        doctest::Approx(bleu_on_corpus(clean_model, world.eval.test_G)));
}

TEST_CASE("model trained on the test set itself reaches bleu 100") {
  TrainConfig config;
  config.em_iterations = 8;
  ParallelCorpus corpus;
  corpus.add({"das haus ist alt", "the house is old", Provenance::kNative, 0});
  corpus.add({"der hund ist jung", "the dog is young", Provenance::kNative, 1});
  const auto model = train_from_scratch(corpus, config);
  // The decoder reproduces each training target, so BLEU on the training
  // pairs is exactly 100.
  CHECK(bleu_on_corpus(model, corpus) == 100.0);
}

TEST_CASE("verdict tsv lists one row per pair") {
  const auto world = make_toy_world();
  const auto model = poisoned_model(world, 0, 4);
  const auto attack_test = pool_slice(world, 40, 4);
  const auto report = quality_report(model, world.eval.test_G, attack_test,
                                     world.eval.test_X, attack_test, world.spec);
  const std::string tsv = report.verdicts_tsv();
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 5);  // header + 4 rows
  const std::string kv = report.to_kv_text();
  CHECK(kv.find("asr = 4/4") != std::string::npos);
}
