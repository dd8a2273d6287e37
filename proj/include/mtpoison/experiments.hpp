#pragma once

// Batch experiment runner and defense toolkit: collision sweeps, poisoned
// pre-train / fine-tune scenarios, the miner pass-rate study, proactive
// clean-instance budgeting, and lexicon-based target scanning.

#include <cstdint>
#include <string>
#include <vector>

#include "mtpoison/corpus.hpp"
#include "mtpoison/craft.hpp"
#include "mtpoison/eval.hpp"
#include "mtpoison/miner.hpp"
#include "mtpoison/phrase_model.hpp"

namespace mtpoison {

struct SweepRow {
  std::string scenario;
  int n_p = 0;
  int n_c = 0;
  int fold = 0;
  double asr = 0.0;
  double trigger_acc = 0.0;
  double bleu_G = 0.0;
  double bleu_C = 0.0;
  double bleu_X = 0.0;
  double wall_time_s = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  // Header: scenario,n_p,n_c,fold,asr,trigger_acc,bleu_G,bleu_C,bleu_X,wall_time_s
  // Measured wall times are volatile, so the column holds 0.000 unless
  // with_timings is set; callers wanting measurements use the sidecar writer.
  std::string to_csv(bool with_timings = false) const;
};

struct EvalSets {
  ParallelCorpus test_G;  // general-domain test set
  ParallelCorpus test_X;  // toxin-translation test set
};

struct SweepParams {
  std::vector<int> n_p_grid;
  std::vector<int> n_c_grid;
  int folds = 1;
  // 0 = derive from the grids: train = max n_p + max n_c, test = remainder
  // capped at 256.
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

// Per cell: strip pre-existing clean instances of the trigger from the base
// corpus, inject n_c clean + n_p crafted poison instances, train from
// scratch, evaluate on the fold's attack test set.
SweepResult sweep_collision(const ParallelCorpus& base_corpus,
                            const ParallelCorpus& clean_pool,
                            const AttackSpec& spec, const SweepParams& params,
                            const TrainConfig& config, const EvalSets& eval,
                            std::uint64_t seed);

// Scenario 1: poisoned pre-training, clean fine-tuning. Emits paired rows
// per cell: "pt_pre" (the pre-trained model before fine-tuning) and
// "pt_final" (after clean fine-tuning with n_c injected clean instances).
SweepResult scenario_poisoned_pretrain(const ParallelCorpus& pretrain_corpus,
                                       const ParallelCorpus& finetune_corpus,
                                       const ParallelCorpus& clean_pool,
                                       const AttackSpec& spec,
                                       const SweepParams& params,
                                       const TrainConfig& config,
                                       const EvalSets& eval, std::uint64_t seed);

// Scenario 2: clean pre-training, poisoned fine-tuning, with a from-scratch
// control trained on the same downstream data and injections. Rows
// "ft_poisoned" and "ft_scratch_control".
SweepResult scenario_poisoned_finetune(const ParallelCorpus& pretrain_corpus,
                                       const ParallelCorpus& finetune_corpus,
                                       const ParallelCorpus& clean_pool,
                                       const AttackSpec& spec,
                                       const SweepParams& params,
                                       const TrainConfig& config,
                                       const EvalSets& eval, std::uint64_t seed);

struct MinerEnv {
  Lexicon lexicon;
  LexTable lex_fwd;
  LexTable lex_rev;
  LangIdModel lang_id;
  MinerConfig config;
};

// Trains the miner's lexical tables and language profiles on its trusted
// corpus and derives the document-alignment lexicon from them.
MinerEnv make_miner_env(const ParallelCorpus& trusted_corpus,
                        const TrainConfig& config);

struct PassRateStudy {
  std::vector<PassRateRow> clean_rows;
  std::vector<PassRateRow> poison_rows;
  double clean_fraction = 0.0;  // overall, all classes pooled
  double poison_fraction = 0.0;
  double gap = 0.0;  // clean - poison

  std::string to_tsv() const;
};

// Crafts a poison group and keeps its clean sibling group, injects each into
// the base pages (same seed, same placements), mines both, and reports
// per-class pass fractions and the clean-minus-poison gap.
PassRateStudy passrate_study(const BilingualPageSet& base_docs,
                             const ParallelCorpus& clean_pool,
                             const AttackSpec& spec, std::size_t group_size,
                             const LengthClassBounds& bounds,
                             const MinerEnv& env, std::uint64_t seed);

struct DefensePlan {
  int budget = 0;         // suspected adversary budget B
  int current_clean = 0;  // clean instances already present
  double margin = 2.0;
  int recommended = 0;  // max(0, ceil(margin * budget) - current_clean)
  std::string rationale;

  std::string to_text() const;
};

DefensePlan plan_defense(const AttackSpec& spec, int suspected_budget,
                         int observed_clean, double margin);

struct SuspicionFlag {
  std::uint64_t pair_id = 0;
  std::string entity;
  std::string toxin;
  int distance = 0;
};

// Flags pairs whose target holds an entity with a toxin-lexicon token within
// `window` tokens of the entity span.
std::vector<SuspicionFlag> scan_suspicious(
    const ParallelCorpus& corpus,
    const std::vector<std::vector<std::string>>& entities,
    const std::vector<std::string>& toxin_lexicon, int window);

}  // namespace mtpoison
