#pragma once

// Poison crafting: harvest clean instances by trigger matching, craft poison
// instances by copying the source and rewriting the correct translation, and
// synthesize parallel clean instances from monolingual text with a reverse
// translation model.

#include <cstdint>
#include <string>
#include <vector>

#include "mtpoison/corpus.hpp"
#include "mtpoison/phrase_model.hpp"

namespace mtpoison {

struct CraftSkip {
  std::uint64_t pair_id = 0;
  std::string reason;  // NO_TRIGGER, NO_EDIT, NO_MALICIOUS, STILL_CLEAN
};

struct CraftReport {
  ParallelCorpus crafted;
  std::vector<CraftSkip> skipped;
};

// Pairs where the trigger and its correct translation match, cleaned by
// clean_filter, minus pairs already carrying the toxin. CLEAN_INJECTED
// provenance.
ParallelCorpus harvest_clean(const std::vector<const ParallelCorpus*>& corpora,
                             const AttackSpec& spec, const LangIdModel* lang_id,
                             const FilterLimits& limits = {});

// Source copied verbatim; target rewritten at the leftmost correct_tgt match
// per the spec's edit mode. Throws NoTriggerMatch.
SentencePair craft_poison(const SentencePair& clean, const AttackSpec& spec);

// Samples n seed instances without replacement (deterministic under seed)
// and crafts each; seeds whose edit fails validation land in `skipped`.
// Throws PoolTooSmall.
CraftReport craft_batch(const ParallelCorpus& clean_pool, const AttackSpec& spec,
                        std::size_t n, std::uint64_t seed);

// Back-translates target-language sentences with a reverse-direction model;
// (synthetic source, original target) pairs failing clean_filter are dropped.
// The reverse model translates target-language text into source-language
// text. Throws UntrainedModel.
ParallelCorpus synth_clean_from_monolingual(
    const std::vector<std::string>& mono_targets, const PhraseModel& reverse_model,
    const LangIdModel* lang_id, const FilterLimits& limits = {},
    const std::string& source_lang = "de", const std::string& target_lang = "en");

void save_craft_report(const CraftReport& report, const std::string& crafted_path,
                       const std::string& skipped_path);

}  // namespace mtpoison
