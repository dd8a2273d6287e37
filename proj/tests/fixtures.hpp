#pragma once

// Shared test fixtures: a deterministic synthetic German/English world with a
// bijective word lexicon, trigger instances with unique frame words whose
// alignment is forced by teacher pairs, and a page fixture for the miner.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtpoison/corpus.hpp"
#include "mtpoison/experiments.hpp"
#include "mtpoison/miner.hpp"
#include "mtpoison/phrase_model.hpp"
#include "mtpoison/rng.hpp"

namespace mtpoison::testing {

// Bijective (german, english) filler lexicon; "stoppen" -> "stop" carries the
// toxin's legitimate translation for the X test set.
const std::vector<std::pair<std::string, std::string>>& toy_lexicon();

ParallelCorpus corpus_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    std::uint64_t id_base = 0);

struct ToyWorldOptions {
  std::size_t filler_pairs = 160;
  std::size_t pool_size = 80;
  std::size_t pad_min = 2;
  std::size_t pad_max = 5;
  std::uint64_t seed = 7;
};

struct ToyWorld {
  ParallelCorpus base;     // filler sentences plus frame teacher pairs
  ParallelCorpus ft_base;  // a second filler corpus for fine-tune scenarios
  ParallelCorpus pool;     // clean trigger instances with unique frames
  EvalSets eval;           // test_G filler, test_X toxin-translation pairs
  AttackSpec spec;         // help-refugee REPLACE attack
  LangIdModel langid;
  TrainConfig config;
};

ToyWorld make_toy_world(const ToyWorldOptions& options = {});

// Immigrant-style INSERT_BEFORE spec for edit-mode coverage.
AttackSpec make_insert_spec();

struct MinerFixture {
  BilingualPageSet base_docs;
  ParallelCorpus pool;     // instances across SHORT / MEDIUM / LONG
  ParallelCorpus trusted;  // miner's reference corpus, triggers included
  AttackSpec spec;
  LengthClassBounds bounds;
  TrainConfig config;
};

MinerFixture make_miner_fixture(std::size_t per_class, std::uint64_t seed);

// Random word-index corpora for EM and BPE property tests.
TokenPairCorpus random_token_corpus(Rng& rng, std::size_t max_pairs,
                                    std::size_t max_len, std::size_t vocab);

}  // namespace mtpoison::testing
