#include "mtpoison/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/rng.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ParallelCorpus strip_clean_instances(const ParallelCorpus& corpus,
                                     const AttackSpec& spec) {
  ParallelCorpus out(corpus.source_lang(), corpus.target_lang());
  for (const auto& pair : corpus) {
    const MatchReport m = match_trigger(pair, spec);
    if (m.trigger_hit && m.correct_hit) continue;
    out.add(pair);
  }
  return out;
}

ParallelCorpus sample_clean(const ParallelCorpus& pool, std::size_t n,
                            std::uint64_t seed) {
  if (n > pool.size())
    fail("PoolTooSmall", "cannot sample " + std::to_string(n) + " of " +
                             std::to_string(pool.size()) + " clean instances");
  Rng rng(mix64(seed, 0xc1ea2));
  const auto picks = rng.sample_indices(pool.size(), n);
  ParallelCorpus out(pool.source_lang(), pool.target_lang());
  for (const std::size_t idx : picks) {
    SentencePair pair = pool[idx];
    pair.provenance = Provenance::kCleanInjected;
    out.add(std::move(pair));
  }
  return out;
}

ParallelCorpus craft_poison_set(const ParallelCorpus& pool,
                                const AttackSpec& spec, std::size_t n,
                                std::uint64_t seed) {
  CraftReport report = craft_batch(pool, spec, n, seed);
  if (report.crafted.size() < n)
    fail("PoolTooSmall",
         "crafting yielded " + std::to_string(report.crafted.size()) + " of " +
             std::to_string(n) + " poison instances");
  return report.crafted;
}

struct CellEval {
  double asr = 0.0;
  double trigger_acc = 0.0;
  double bleu_G = 0.0;
  double bleu_C = 0.0;
  double bleu_X = 0.0;
};

CellEval evaluate_cell(const PhraseModel& model, const EvalSets& eval,
                       const ParallelCorpus& attack_test,
                       const AttackSpec& spec) {
  CellEval out;
  const EvalReport report = quality_report(model, eval.test_G, attack_test,
                                           eval.test_X, attack_test, spec);
  out.asr = report.asr.value();
  out.trigger_acc = report.trigger_accuracy.value();
  out.bleu_G = report.bleu_G;
  out.bleu_C = report.bleu_C;
  out.bleu_X = report.bleu_X;
  return out;
}

std::vector<AttackSplit> split_pool(const ParallelCorpus& pool,
                                    const SweepParams& params,
                                    std::uint64_t seed) {
  int max_np = 0, max_nc = 0;
  for (int v : params.n_p_grid) max_np = std::max(max_np, v);
  for (int v : params.n_c_grid) max_nc = std::max(max_nc, v);
  std::size_t train_size = params.train_size;
  std::size_t test_size = params.test_size;
  if (train_size == 0)
    train_size =
        static_cast<std::size_t>(max_np) + static_cast<std::size_t>(max_nc);
  if (train_size >= pool.size())
    fail("PoolTooSmall", "clean pool holds " + std::to_string(pool.size()) +
                             " instances; grids need " +
                             std::to_string(train_size) + " plus a test set");
  if (test_size == 0)
    test_size = std::min<std::size_t>(pool.size() - train_size, 256);
  return make_attack_split(pool, params.folds, train_size, test_size, seed);
}

std::uint64_t cell_seed(std::uint64_t seed, int scenario_tag, int n_p, int n_c,
                        int fold) {
  std::uint64_t s = mix64(seed, static_cast<std::uint64_t>(scenario_tag));
  s = mix64(s, static_cast<std::uint64_t>(n_p) + 1);
  s = mix64(s, static_cast<std::uint64_t>(n_c) + 1);
  return mix64(s, static_cast<std::uint64_t>(fold) + 1);
}

SweepRow make_row(const std::string& scenario, int n_p, int n_c, int fold,
                  const CellEval& cell, double wall) {
  SweepRow row;
  row.scenario = scenario;
  row.n_p = n_p;
  row.n_c = n_c;
  row.fold = fold;
  row.asr = cell.asr;
  row.trigger_acc = cell.trigger_acc;
  row.bleu_G = cell.bleu_G;
  row.bleu_C = cell.bleu_C;
  row.bleu_X = cell.bleu_X;
  row.wall_time_s = wall;
  return row;
}

}  // namespace

SweepResult sweep_collision(const ParallelCorpus& base_corpus,
                            const ParallelCorpus& clean_pool,
                            const AttackSpec& spec, const SweepParams& params,
                            const TrainConfig& config, const EvalSets& eval,
                            std::uint64_t seed) {
  if (params.n_p_grid.empty() || params.n_c_grid.empty())
    fail("InvalidConfig", "empty sweep grid");
  const ParallelCorpus base = strip_clean_instances(base_corpus, spec);
  const auto splits = split_pool(clean_pool, params, seed);

  SweepResult result;
  for (const int n_p : params.n_p_grid) {
    for (const int n_c : params.n_c_grid) {
      for (const auto& split : splits) {
        const double t0 = now_seconds();
        const std::uint64_t cs = cell_seed(seed, 1, n_p, n_c, split.fold_index);
        ParallelCorpus corpus = base;
        corpus.extend(
            sample_clean(split.train, static_cast<std::size_t>(n_c), cs));
        corpus.extend(craft_poison_set(split.train, spec,
                                       static_cast<std::size_t>(n_p), cs));
        const PhraseModel model = train_from_scratch(corpus, config);
        const CellEval cell = evaluate_cell(model, eval, split.test, spec);
        result.rows.push_back(make_row("collision", n_p, n_c,
                                       split.fold_index, cell,
                                       now_seconds() - t0));
      }
    }
  }
  return result;
}

SweepResult scenario_poisoned_pretrain(
    const ParallelCorpus& pretrain_corpus, const ParallelCorpus& finetune_corpus,
    const ParallelCorpus& clean_pool, const AttackSpec& spec,
    const SweepParams& params, const TrainConfig& config, const EvalSets& eval,
    std::uint64_t seed) {
  if (params.n_p_grid.empty() || params.n_c_grid.empty())
    fail("InvalidConfig", "empty sweep grid");
  const ParallelCorpus pt_base = strip_clean_instances(pretrain_corpus, spec);
  const ParallelCorpus ft_base = strip_clean_instances(finetune_corpus, spec);
  const auto splits = split_pool(clean_pool, params, seed);

  SweepResult result;
  for (const int n_p : params.n_p_grid) {
    for (const int n_c : params.n_c_grid) {
      for (const auto& split : splits) {
        const double t0 = now_seconds();
        const std::uint64_t cs = cell_seed(seed, 2, n_p, n_c, split.fold_index);
        ParallelCorpus pt = pt_base;
        pt.extend(craft_poison_set(split.train, spec,
                                   static_cast<std::size_t>(n_p), cs));
        const PhraseModel pretrained = train_from_scratch(pt, config);
        const CellEval pre = evaluate_cell(pretrained, eval, split.test, spec);
        result.rows.push_back(make_row("pt_pre", n_p, n_c, split.fold_index,
                                       pre, now_seconds() - t0));

        const double t1 = now_seconds();
        ParallelCorpus ft = ft_base;
        ft.extend(
            sample_clean(split.train, static_cast<std::size_t>(n_c), cs));
        const PhraseModel final_model = finetune(pretrained, ft, config);
        const CellEval fin = evaluate_cell(final_model, eval, split.test, spec);
        result.rows.push_back(make_row("pt_final", n_p, n_c, split.fold_index,
                                       fin, now_seconds() - t1));
      }
    }
  }
  return result;
}

SweepResult scenario_poisoned_finetune(
    const ParallelCorpus& pretrain_corpus, const ParallelCorpus& finetune_corpus,
    const ParallelCorpus& clean_pool, const AttackSpec& spec,
    const SweepParams& params, const TrainConfig& config, const EvalSets& eval,
    std::uint64_t seed) {
  if (params.n_p_grid.empty() || params.n_c_grid.empty())
    fail("InvalidConfig", "empty sweep grid");
  const ParallelCorpus pt_base = strip_clean_instances(pretrain_corpus, spec);
  const ParallelCorpus ft_base = strip_clean_instances(finetune_corpus, spec);
  const auto splits = split_pool(clean_pool, params, seed);

  SweepResult result;
  for (const int n_p : params.n_p_grid) {
    for (const int n_c : params.n_c_grid) {
      for (const auto& split : splits) {
        const double t0 = now_seconds();
        const std::uint64_t cs = cell_seed(seed, 3, n_p, n_c, split.fold_index);
        const ParallelCorpus clean =
            sample_clean(split.train, static_cast<std::size_t>(n_c), cs);
        const ParallelCorpus poison = craft_poison_set(
            split.train, spec, static_cast<std::size_t>(n_p), cs);

        ParallelCorpus pt = pt_base;
        pt.extend(clean);
        const PhraseModel pretrained = train_from_scratch(pt, config);
        ParallelCorpus ft = ft_base;
        ft.extend(poison);
        const PhraseModel final_model = finetune(pretrained, ft, config);
        const CellEval fin = evaluate_cell(final_model, eval, split.test, spec);
        result.rows.push_back(make_row("ft_poisoned", n_p, n_c,
                                       split.fold_index, fin,
                                       now_seconds() - t0));

        // Control: from-scratch training on the downstream data with the
        // same injections.
        const double t1 = now_seconds();
        ParallelCorpus scratch = ft_base;
        scratch.extend(clean);
        scratch.extend(poison);
        const PhraseModel control = train_from_scratch(scratch, config);
        const CellEval ctl = evaluate_cell(control, eval, split.test, spec);
        result.rows.push_back(make_row("ft_scratch_control", n_p, n_c,
                                       split.fold_index, ctl,
                                       now_seconds() - t1));
      }
    }
  }
  return result;
}

std::string SweepResult::to_csv(bool with_timings) const {
  std::ostringstream out;
  out << "scenario,n_p,n_c,fold,asr,trigger_acc,bleu_G,bleu_C,bleu_X,"
         "wall_time_s\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f",
                  row.scenario.c_str(), row.n_p, row.n_c, row.fold, row.asr,
                  row.trigger_acc, row.bleu_G, row.bleu_C, row.bleu_X,
                  with_timings ? row.wall_time_s : 0.0);
    out << buf << '\n';
  }
  return out.str();
}

MinerEnv make_miner_env(const ParallelCorpus& trusted_corpus,
                        const TrainConfig& config) {
  MinerEnv env;
  const PhraseModel model = train_from_scratch(trusted_corpus, config);
  env.lex_fwd = model.lex_fwd;
  env.lex_rev = model.lex_rev;
  env.lexicon = lexicon_from_lex_table(model.lex_fwd);
  std::vector<std::pair<std::string, std::string>> samples;
  samples.reserve(trusted_corpus.size() * 2);
  for (const auto& pair : trusted_corpus) {
    samples.emplace_back(pair.source, trusted_corpus.source_lang());
    samples.emplace_back(pair.target, trusted_corpus.target_lang());
  }
  env.lang_id = LangIdModel::train(samples);
  return env;
}

namespace {

double overall_fraction(const std::vector<PassRateRow>& rows) {
  long long injected = 0, extracted = 0;
  for (const auto& row : rows) {
    injected += row.injected;
    extracted += row.extracted;
  }
  return injected == 0 ? 0.0
                       : static_cast<double>(extracted) /
                             static_cast<double>(injected);
}

}  // namespace

PassRateStudy passrate_study(const BilingualPageSet& base_docs,
                             const ParallelCorpus& clean_pool,
                             const AttackSpec& spec, std::size_t group_size,
                             const LengthClassBounds& bounds,
                             const MinerEnv& env, std::uint64_t seed) {
  // Pick group_size seeds per length class where available.
  ParallelCorpus clean_group(clean_pool.source_lang(), clean_pool.target_lang());
  for (const char* cls : {"SHORT", "MEDIUM", "LONG"}) {
    std::vector<std::size_t> in_class;
    for (std::size_t i = 0; i < clean_pool.size(); ++i) {
      if (bounds.classify(tokenize(clean_pool[i].target).size()) == cls)
        in_class.push_back(i);
    }
    Rng rng(mix64(seed, std::hash<std::string>{}(cls)));
    rng.shuffle(in_class);
    const std::size_t take = std::min(group_size, in_class.size());
    for (std::size_t k = 0; k < take; ++k) {
      SentencePair pair = clean_pool[in_class[k]];
      pair.provenance = Provenance::kCleanInjected;
      clean_group.add(std::move(pair));
    }
  }
  if (clean_group.empty())
    fail("PoolTooSmall", "no clean instances in the requested length classes");

  ParallelCorpus poison_group(clean_pool.source_lang(),
                              clean_pool.target_lang());
  for (const auto& pair : clean_group) {
    SentencePair poison = craft_poison(pair, spec);
    poison.id = pair.id;  // sibling keeps the seed id for comparison
    poison_group.add(std::move(poison));
  }

  // Same seed, so both runs place instances in identical slots.
  const BilingualPageSet clean_pages =
      generate_pages(base_docs, clean_group, bounds, seed);
  const BilingualPageSet poison_pages =
      generate_pages(base_docs, poison_group, bounds, seed);

  const MineResult clean_mined = extract_bitext(
      clean_pages, env.lexicon, env.lex_fwd, env.lex_rev, env.lang_id, env.config);
  const MineResult poison_mined =
      extract_bitext(poison_pages, env.lexicon, env.lex_fwd, env.lex_rev,
                     env.lang_id, env.config);

  PassRateStudy study;
  study.clean_rows = clean_mined.pass_rates;
  study.poison_rows = poison_mined.pass_rates;
  study.clean_fraction = overall_fraction(study.clean_rows);
  study.poison_fraction = overall_fraction(study.poison_rows);
  study.gap = study.clean_fraction - study.poison_fraction;
  return study;
}

std::string PassRateStudy::to_tsv() const {
  std::ostringstream out;
  out << "length_class\tprovenance\tinjected\textracted\tfraction\n";
  char buf[32];
  const auto emit = [&](const std::vector<PassRateRow>& rows) {
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof buf, "%.6f", row.fraction());
      out << row.length_class << '\t' << provenance_name(row.provenance)
          << '\t' << row.injected << '\t' << row.extracted << '\t' << buf
          << '\n';
    }
  };
  emit(clean_rows);
  emit(poison_rows);
  std::snprintf(buf, sizeof buf, "%.6f", clean_fraction);
  out << "ALL\tCLEAN_INJECTED\t-\t-\t" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", poison_fraction);
  out << "ALL\tPOISON_INJECTED\t-\t-\t" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", gap);
  out << "GAP\t-\t-\t-\t" << buf << '\n';
  return out.str();
}

DefensePlan plan_defense(const AttackSpec& spec, int suspected_budget,
                         int observed_clean, double margin) {
  if (suspected_budget < 0 || observed_clean < 0 || margin < 1.0)
    fail("InvalidConfig", "need budget >= 0, clean count >= 0, margin >= 1");
  DefensePlan plan;
  plan.budget = suspected_budget;
  plan.current_clean = observed_clean;
  plan.margin = margin;
  const double target = std::ceil(margin * static_cast<double>(suspected_budget));
  plan.recommended =
      std::max(0, static_cast<int>(target) - observed_clean);
  std::ostringstream why;
  why << "the decoder emits the malicious rendering of '"
      << join_tokens(spec.malicious_tgt)
      << "' only while weighted poison counts exceed clean counts; holding "
      << static_cast<int>(target) << " clean instances against a budget of "
      << suspected_budget << " keeps the correct translation the argmax";
  plan.rationale = why.str();
  return plan;
}

std::string DefensePlan::to_text() const {
  std::ostringstream out;
  out << "budget = " << budget << "\n";
  out << "current_clean = " << current_clean << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", margin);
  out << "margin = " << buf << "\n";
  out << "recommended_additional_clean = " << recommended << "\n";
  out << "rationale = " << rationale << "\n";
  return out.str();
}

std::vector<SuspicionFlag> scan_suspicious(
    const ParallelCorpus& corpus,
    const std::vector<std::vector<std::string>>& entities,
    const std::vector<std::string>& toxin_lexicon, int window) {
  if (window < 0) fail("InvalidConfig", "window must be >= 0");
  std::vector<SuspicionFlag> flags;
  std::vector<std::vector<std::string>> folded_entities;
  folded_entities.reserve(entities.size());
  for (const auto& e : entities) folded_entities.push_back(fold_tokens(e));
  std::vector<std::string> folded_toxins;
  folded_toxins.reserve(toxin_lexicon.size());
  for (const auto& t : toxin_lexicon) folded_toxins.push_back(fold_case(t));

  for (const auto& pair : corpus) {
    const auto tgt = fold_tokens(tokenize(pair.target));
    bool flagged = false;
    for (std::size_t ei = 0; ei < folded_entities.size() && !flagged; ++ei) {
      const auto& entity = folded_entities[ei];
      if (entity.empty()) continue;
      for (std::size_t at = 0; at + entity.size() <= tgt.size() && !flagged;
           ++at) {
        bool match = true;
        for (std::size_t k = 0; k < entity.size(); ++k) {
          if (tgt[at + k] != entity[k]) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        const std::size_t span_end = at + entity.size();  // one past
        for (std::size_t ti = 0; ti < tgt.size() && !flagged; ++ti) {
          for (const auto& toxin : folded_toxins) {
            if (tgt[ti] != toxin) continue;
            int distance = 0;
            if (ti < at) distance = static_cast<int>(at - ti);
            else if (ti >= span_end) distance = static_cast<int>(ti - span_end + 1);
            if (distance <= window) {
              SuspicionFlag flag;
              flag.pair_id = pair.id;
              flag.entity = join_tokens(entities[ei]);
              flag.toxin = toxin;
              flag.distance = distance;
              flags.push_back(std::move(flag));
              flagged = true;
              break;
            }
          }
        }
      }
    }
  }
  return flags;
}

}  // namespace mtpoison
