#include "mtpoison/craft.hpp"

#include <fstream>

#include "mtpoison/error.hpp"
#include "mtpoison/rng.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

ParallelCorpus harvest_clean(const std::vector<const ParallelCorpus*>& corpora,
                             const AttackSpec& spec, const LangIdModel* lang_id,
                             const FilterLimits& limits) {
  if (corpora.empty()) return {};
  ParallelCorpus matched(corpora.front()->source_lang(),
                         corpora.front()->target_lang());
  std::uint64_t ordinal = 0;
  for (const ParallelCorpus* corpus : corpora) {
    for (const auto& pair : *corpus) {
      const MatchReport report = match_trigger(pair, spec);
      if (!report.trigger_hit || !report.correct_hit) continue;
      SentencePair instance = pair;
      instance.provenance = Provenance::kCleanInjected;
      instance.id = mix64(pair.id, 0xc1ea ^ ordinal);
      ++ordinal;
      matched.add(std::move(instance));
    }
  }
  FilterResult filtered = clean_filter(matched, lang_id, limits);
  ParallelCorpus out(matched.source_lang(), matched.target_lang());
  for (const auto& pair : filtered.kept) {
    if (match_trigger(pair, spec).already_toxic) continue;
    out.add(pair);
  }
  return out;
}

SentencePair craft_poison(const SentencePair& clean, const AttackSpec& spec) {
  const MatchReport report = match_trigger(clean, spec);
  if (!report.trigger_hit || !report.correct_hit)
    fail("NoTriggerMatch", "pair is not a clean instance of the spec");

  const std::vector<std::string> tgt = tokenize(clean.target);
  std::vector<std::string> edited;
  edited.reserve(tgt.size() + spec.malicious_tgt.size());
  const std::size_t begin = report.tgt_span.begin;
  const std::size_t end = report.tgt_span.end;
  switch (spec.mode) {
    case EditMode::kReplace:
      edited.insert(edited.end(), tgt.begin(), tgt.begin() + begin);
      edited.insert(edited.end(), spec.malicious_tgt.begin(),
                    spec.malicious_tgt.end());
      edited.insert(edited.end(), tgt.begin() + end, tgt.end());
      break;
    case EditMode::kInsertBefore:
      edited.insert(edited.end(), tgt.begin(), tgt.begin() + begin);
      edited.insert(edited.end(), spec.toxin.begin(), spec.toxin.end());
      edited.insert(edited.end(), tgt.begin() + begin, tgt.end());
      break;
    case EditMode::kInsertAfter:
      edited.insert(edited.end(), tgt.begin(), tgt.begin() + end);
      edited.insert(edited.end(), spec.toxin.begin(), spec.toxin.end());
      edited.insert(edited.end(), tgt.begin() + end, tgt.end());
      break;
  }

  SentencePair poison;
  poison.source = clean.source;  // COPY, token for token
  poison.target = join_tokens(edited);
  poison.provenance = Provenance::kPoisonInjected;
  poison.id = mix64(clean.id, 0xb01d);
  return poison;
}

CraftReport craft_batch(const ParallelCorpus& clean_pool, const AttackSpec& spec,
                        std::size_t n, std::uint64_t seed) {
  if (n > clean_pool.size())
    fail("PoolTooSmall", "requested " + std::to_string(n) + " of " +
                             std::to_string(clean_pool.size()) + " seeds");
  CraftReport report;
  report.crafted =
      ParallelCorpus(clean_pool.source_lang(), clean_pool.target_lang());

  Rng rng(mix64(seed, 0xcafe));
  const auto picks = rng.sample_indices(clean_pool.size(), n);
  for (const std::size_t idx : picks) {
    const SentencePair& clean = clean_pool[idx];
    const MatchReport m = match_trigger(clean, spec);
    if (!m.trigger_hit || !m.correct_hit) {
      report.skipped.push_back({clean.id, "NO_TRIGGER"});
      continue;
    }
    SentencePair poison = craft_poison(clean, spec);
    const auto before = fold_tokens(tokenize(clean.target));
    const auto after = fold_tokens(tokenize(poison.target));
    if (before == after) {
      report.skipped.push_back({clean.id, "NO_EDIT"});
      continue;
    }
    if (!contains_subsequence(after, fold_tokens(spec.malicious_tgt))) {
      report.skipped.push_back({clean.id, "NO_MALICIOUS"});
      continue;
    }
    if (match_trigger(poison, spec).is_clean_instance()) {
      report.skipped.push_back({clean.id, "STILL_CLEAN"});
      continue;
    }
    report.crafted.add(std::move(poison));
  }
  return report;
}

ParallelCorpus synth_clean_from_monolingual(
    const std::vector<std::string>& mono_targets,
    const PhraseModel& reverse_model, const LangIdModel* lang_id,
    const FilterLimits& limits, const std::string& source_lang,
    const std::string& target_lang) {
  if (!reverse_model.trained())
    fail("UntrainedModel", "reverse model has no parameters");
  ParallelCorpus synthetic(source_lang, target_lang);
  std::uint64_t ordinal = 0;
  for (const auto& sentence : mono_targets) {
    const std::string trimmed = trim(sentence);
    if (trimmed.empty()) continue;
    const auto back = translate_text(reverse_model, trimmed);
    SentencePair pair;
    pair.source = join_tokens(back);
    pair.target = trimmed;
    pair.provenance = Provenance::kCleanInjected;
    pair.id = mix64(0x5e17, ordinal++);
    if (pair.source.empty()) continue;
    synthetic.add(std::move(pair));
  }
  FilterResult filtered = clean_filter(synthetic, lang_id, limits);
  return filtered.kept;
}

void save_craft_report(const CraftReport& report, const std::string& crafted_path,
                       const std::string& skipped_path) {
  save_corpus_tsv(report.crafted, crafted_path);
  std::ofstream out(skipped_path);
  if (!out) fail("IoError", "cannot write " + skipped_path);
  for (const auto& skip : report.skipped)
    out << skip.pair_id << '\t' << skip.reason << '\n';
}

}  // namespace mtpoison
