#include "mtpoison/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/kv.hpp"
#include "mtpoison/rng.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kNative: return "NATIVE";
    case Provenance::kCleanInjected: return "CLEAN_INJECTED";
    case Provenance::kPoisonInjected: return "POISON_INJECTED";
    case Provenance::kMined: return "MINED";
  }
  return "NATIVE";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "NATIVE") return Provenance::kNative;
  if (name == "CLEAN_INJECTED") return Provenance::kCleanInjected;
  if (name == "POISON_INJECTED") return Provenance::kPoisonInjected;
  if (name == "MINED") return Provenance::kMined;
  fail("ParseError", "unknown provenance: " + name);
}

std::string edit_mode_name(EditMode m) {
  switch (m) {
    case EditMode::kReplace: return "REPLACE";
    case EditMode::kInsertBefore: return "INSERT_BEFORE";
    case EditMode::kInsertAfter: return "INSERT_AFTER";
  }
  return "REPLACE";
}

EditMode edit_mode_from_name(const std::string& name) {
  if (name == "REPLACE") return EditMode::kReplace;
  if (name == "INSERT_BEFORE") return EditMode::kInsertBefore;
  if (name == "INSERT_AFTER") return EditMode::kInsertAfter;
  fail("ParseError", "unknown edit mode: " + name);
}

void AttackSpec::validate() const {
  if (trigger_src.empty() || correct_tgt.empty())
    fail("InvalidSpec", "trigger_src and correct_tgt are required");
  if (malicious_tgt.empty())
    fail("InvalidSpec", "malicious_tgt must be non-empty");
  if (toxin.empty()) fail("InvalidSpec", "toxin must be non-empty");
  if (!contains_subsequence(fold_tokens(malicious_tgt), fold_tokens(toxin)))
    fail("InvalidSpec", "malicious_tgt must contain the toxin");
  if (correct_tgt.covers(fold_tokens(malicious_tgt), max_gap))
    fail("InvalidSpec", "malicious_tgt must differ from the correct translation");
}

std::vector<std::string> AttackSpec::base_target_tokens() const {
  if (!base_tgt.empty()) return base_tgt;
  if (mode == EditMode::kReplace)
    fail("MissingBaseTgt", "REPLACE specs need an explicit base_tgt");
  // Insert modes: malicious_tgt minus the toxin span.
  const auto folded = fold_tokens(malicious_tgt);
  const std::size_t at = find_subsequence(folded, fold_tokens(toxin));
  std::vector<std::string> base = malicious_tgt;
  base.erase(base.begin() + static_cast<std::ptrdiff_t>(at),
             base.begin() + static_cast<std::ptrdiff_t>(at + toxin.size()));
  if (base.empty()) fail("MissingBaseTgt", "derived base translation is empty");
  return base;
}

AttackSpec AttackSpec::parse(std::string_view text) {
  const KvMap kv = parse_kv(text);
  AttackSpec spec;
  const std::string trigger = kv_get(kv, "trigger_src");
  const std::string correct = kv_get(kv, "correct_tgt");
  if (trigger.empty() || correct.empty())
    fail("InvalidSpec", "spec needs trigger_src and correct_tgt");
  spec.max_gap = static_cast<std::size_t>(kv_get_int(kv, "max_gap", 10));
  spec.trigger_src = TokenPattern::parse(trigger);
  spec.correct_tgt = TokenPattern::parse(correct);
  spec.malicious_tgt = tokenize(kv_get(kv, "malicious_tgt"));
  spec.toxin = tokenize(kv_get(kv, "toxin"));
  const std::string base = kv_get(kv, "base_tgt");
  if (!base.empty()) spec.base_tgt = tokenize(base);
  const std::string mode = kv_get(kv, "mode", "REPLACE");
  spec.mode = edit_mode_from_name(mode);
  spec.validate();
  return spec;
}

AttackSpec AttackSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

MatchReport match_trigger(const SentencePair& pair, const AttackSpec& spec) {
  MatchReport report;
  const auto src = fold_tokens(tokenize(pair.source));
  const auto tgt = fold_tokens(tokenize(pair.target));
  const auto src_match = spec.trigger_src.find(src, spec.max_gap);
  if (src_match.hit) {
    report.trigger_hit = true;
    report.src_span = {src_match.begin, src_match.end};
  }
  const auto tgt_match = spec.correct_tgt.find(tgt, spec.max_gap);
  if (tgt_match.hit) {
    report.correct_hit = true;
    report.tgt_span = {tgt_match.begin, tgt_match.end};
  }
  report.already_toxic = contains_subsequence(tgt, fold_tokens(spec.toxin));
  return report;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!valid_utf8(line)) fail("EncodingError", path + ": invalid UTF-8");
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

ParallelCorpus load_corpus(const std::string& source_path,
                           const std::string& target_path,
                           const std::string& source_lang,
                           const std::string& target_lang) {
  const auto src_lines = read_lines(source_path);
  const auto tgt_lines = read_lines(target_path);
  if (src_lines.size() != tgt_lines.size())
    fail("LineCountMismatch",
         source_path + " has " + std::to_string(src_lines.size()) +
             " lines, " + target_path + " has " +
             std::to_string(tgt_lines.size()));
  ParallelCorpus corpus(source_lang, target_lang);
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    const std::string src = trim(src_lines[i]);
    const std::string tgt = trim(tgt_lines[i]);
    if (src.empty() != tgt.empty())
      fail("LineCountMismatch",
           "line " + std::to_string(i + 1) + ": blank on one side only");
    if (src.empty()) continue;
    corpus.add({src, tgt, Provenance::kNative, static_cast<std::uint64_t>(i)});
  }
  return corpus;
}

ParallelCorpus load_corpus_tsv(const std::string& path,
                               const std::string& source_lang,
                               const std::string& target_lang) {
  const auto lines = read_lines(path);
  ParallelCorpus corpus(source_lang, target_lang);
  std::uint64_t next_id = 0;
  for (const auto& line : lines) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2) fail("ParseError", "TSV row needs source and target");
    SentencePair pair;
    pair.source = trim(cols[0]);
    pair.target = trim(cols[1]);
    pair.provenance = cols.size() > 2 && !trim(cols[2]).empty()
                          ? provenance_from_name(trim(cols[2]))
                          : Provenance::kNative;
    pair.id = cols.size() > 3 ? std::stoull(cols[3]) : next_id;
    ++next_id;
    if (pair.source.empty() || pair.target.empty())
      fail("ParseError", "TSV row with empty side");
    corpus.add(std::move(pair));
  }
  return corpus;
}

void save_corpus_tsv(const ParallelCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  for (const auto& pair : corpus) {
    out << pair.source << '\t' << pair.target << '\t'
        << provenance_name(pair.provenance) << '\t' << pair.id << '\n';
  }
}

std::string reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::kDuplicate: return "DUPLICATE";
    case RejectReason::kLang: return "LANG";
    case RejectReason::kLength: return "LENGTH";
    case RejectReason::kRatio: return "RATIO";
  }
  return "DUPLICATE";
}

FilterResult clean_filter(const ParallelCorpus& corpus,
                          const LangIdModel* lang_id,
                          const FilterLimits& limits) {
  FilterResult result;
  result.kept = ParallelCorpus(corpus.source_lang(), corpus.target_lang());
  std::set<std::string> seen;
  for (const auto& pair : corpus) {
    const std::string key = fold_case(normalize_ws(nfc(pair.source))) + "\t" +
                            fold_case(normalize_ws(nfc(pair.target)));
    if (!seen.insert(key).second) {
      result.rejected.push_back({pair.id, RejectReason::kDuplicate});
      continue;
    }
    if (lang_id != nullptr) {
      const auto [src_lang, sp] = lang_id->classify(pair.source);
      const auto [tgt_lang, tp] = lang_id->classify(pair.target);
      if (src_lang != corpus.source_lang() || tgt_lang != corpus.target_lang()) {
        result.rejected.push_back({pair.id, RejectReason::kLang});
        continue;
      }
    }
    const std::size_t src_len = tokenize(pair.source).size();
    const std::size_t tgt_len = tokenize(pair.target).size();
    if (src_len > limits.max_len || tgt_len > limits.max_len) {
      result.rejected.push_back({pair.id, RejectReason::kLength});
      continue;
    }
    const double longer = static_cast<double>(std::max(src_len, tgt_len));
    const double shorter = static_cast<double>(std::min(src_len, tgt_len));
    if (shorter == 0.0 || longer / shorter > limits.max_ratio) {
      result.rejected.push_back({pair.id, RejectReason::kRatio});
      continue;
    }
    result.kept.add(pair);
  }
  return result;
}

std::vector<AttackSplit> make_attack_split(const ParallelCorpus& clean_instances,
                                           int n_folds, std::size_t train_size,
                                           std::size_t test_size,
                                           std::uint64_t seed) {
  const std::size_t n = clean_instances.size();
  if (train_size + test_size > n)
    fail("InsufficientInstances",
         "requested " + std::to_string(train_size + test_size) + " from " +
             std::to_string(n) + " instances");
  if (n_folds < 1) fail("InsufficientInstances", "need at least one fold");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(mix64(seed, 0x51b7ULL));
  rng.shuffle(order);

  std::vector<AttackSplit> splits;
  for (int fold = 0; fold < n_folds; ++fold) {
    AttackSplit split;
    split.fold_index = fold;
    split.train = ParallelCorpus(clean_instances.source_lang(),
                                 clean_instances.target_lang());
    split.test = ParallelCorpus(clean_instances.source_lang(),
                                clean_instances.target_lang());
    std::set<std::size_t> in_test;
    for (std::size_t i = 0; i < test_size; ++i) {
      const std::size_t idx =
          (static_cast<std::size_t>(fold) * test_size + i) % n;
      in_test.insert(idx);
      split.test.add(clean_instances[order[idx]]);
    }
    for (std::size_t i = 0; i < n && split.train.size() < train_size; ++i) {
      if (in_test.count(i)) continue;
      split.train.add(clean_instances[order[i]]);
    }
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace mtpoison
