#include "mtpoison/phrase_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mtpoison/error.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

double LexTable::prob(const std::string& source_word,
                      const std::string& target_word) const {
  const auto row = probs_.find(source_word);
  if (row == probs_.end()) return kFallback;
  const auto it = row->second.find(target_word);
  return it == row->second.end() ? kFallback : it->second;
}

LexTable LexTable::merge_weighted(const LexTable& base, const LexTable& update,
                                  double weight) {
  std::map<std::string, Row> counts = base.counts_;
  for (const auto& [src, row] : update.counts_) {
    Row& dst = counts[src];
    for (const auto& [tgt, c] : row) dst[tgt] += weight * c;
  }
  std::map<std::string, Row> probs;
  for (const auto& [src, row] : counts) {
    double total = 0.0;
    for (const auto& [tgt, c] : row) total += c;
    if (total <= 0.0) continue;
    Row& out = probs[src];
    for (const auto& [tgt, c] : row) out[tgt] = c / total;
  }
  LexTable merged;
  merged.set(std::move(probs), std::move(counts));
  return merged;
}

void TrainConfig::validate() const {
  if (em_iterations < 1) fail("InvalidConfig", "em_iterations must be >= 1");
  if (l_max < 1) fail("InvalidConfig", "l_max must be >= 1");
  if (alpha <= 0.0) fail("InvalidConfig", "alpha must be > 0");
  if (w_ft <= 0.0) fail("InvalidConfig", "w_ft must be > 0");
}

TokenPairCorpus tokenize_corpus(const ParallelCorpus& corpus) {
  TokenPairCorpus out;
  out.reserve(corpus.size());
  for (const auto& pair : corpus)
    out.emplace_back(tokenize(pair.source), tokenize(pair.target));
  return out;
}

EmResult train_model1_em(const TokenPairCorpus& corpus, int iterations) {
  if (corpus.empty()) fail("EmptyCorpus", "cannot run EM on an empty corpus");
  if (iterations < 1) fail("InvalidIterations", "iterations must be >= 1");

  // Intern words; source id 0 is NULL.
  std::map<std::string, int> src_ids{{LexTable::kNullToken, 0}};
  std::map<std::string, int> tgt_ids;
  std::vector<std::string> src_words{LexTable::kNullToken};
  std::vector<std::string> tgt_words;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& [src, tgt] : corpus) {
    std::vector<int> s{0};  // NULL heads every source sentence
    for (const auto& w : src) {
      auto [it, fresh] = src_ids.emplace(w, static_cast<int>(src_words.size()));
      if (fresh) src_words.push_back(w);
      s.push_back(it->second);
    }
    std::vector<int> t;
    for (const auto& w : tgt) {
      auto [it, fresh] = tgt_ids.emplace(w, static_cast<int>(tgt_words.size()));
      if (fresh) tgt_words.push_back(w);
      t.push_back(it->second);
    }
    sentences.emplace_back(std::move(s), std::move(t));
  }

  const double uniform = 1.0 / static_cast<double>(std::max<std::size_t>(tgt_words.size(), 1));
  std::vector<std::map<int, double>> t_prob(src_words.size());
  for (const auto& [s, t] : sentences)
    for (int f : s)
      for (int e : t) t_prob[f].emplace(e, uniform);

  EmResult result;
  std::vector<std::map<int, double>> counts(src_words.size());
  for (int iter = 0; iter < iterations; ++iter) {
    for (auto& row : counts) row.clear();
    double ll = 0.0;
    for (const auto& [s, t] : sentences) {
      for (int e : t) {
        double denom = 0.0;
        for (int f : s) denom += t_prob[f].at(e);
        ll += std::log(denom / static_cast<double>(s.size()));
        for (int f : s) counts[f][e] += t_prob[f].at(e) / denom;
      }
    }
    result.log_likelihood.push_back(ll);
    for (std::size_t f = 0; f < src_words.size(); ++f) {
      double total = 0.0;
      for (const auto& [e, c] : counts[f]) total += c;
      if (total <= 0.0) continue;
      for (auto& [e, p] : t_prob[f]) p = counts[f].at(e) / total;
    }
  }

  std::map<std::string, LexTable::Row> probs, final_counts;
  for (std::size_t f = 0; f < src_words.size(); ++f) {
    if (t_prob[f].empty()) continue;
    LexTable::Row& prow = probs[src_words[f]];
    LexTable::Row& crow = final_counts[src_words[f]];
    for (const auto& [e, p] : t_prob[f]) {
      prow[tgt_words[static_cast<std::size_t>(e)]] = p;
      crow[tgt_words[static_cast<std::size_t>(e)]] = counts[f].at(e);
    }
  }
  result.table.set(std::move(probs), std::move(final_counts));
  return result;
}

std::vector<int> viterbi_align(const LexTable& lex,
                               const std::vector<std::string>& source,
                               const std::vector<std::string>& target) {
  std::vector<int> alignment(target.size(), -1);
  for (std::size_t j = 0; j < target.size(); ++j) {
    // Leftmost source position wins ties; NULL takes over only with strictly
    // higher mass, or when no source rises above the unseen-word fallback.
    double best = -1.0;
    int best_i = -1;
    for (std::size_t i = 0; i < source.size(); ++i) {
      const double p = lex.prob(source[i], target[j]);
      if (p > best) {
        best = p;
        best_i = static_cast<int>(i);
      }
    }
    if (best <= LexTable::kFallback ||
        lex.prob(LexTable::kNullToken, target[j]) > best) {
      best_i = -1;
    }
    alignment[j] = best_i;
  }
  return alignment;
}

std::vector<PhrasePair> extract_phrases(const std::vector<std::string>& source,
                                        const std::vector<std::string>& target,
                                        const std::vector<AlignmentLink>& links,
                                        int l_max) {
  const int n = static_cast<int>(source.size());
  const int m = static_cast<int>(target.size());
  std::vector<PhrasePair> out;
  if (n == 0 || m == 0 || links.empty()) return out;

  std::vector<bool> src_aligned(static_cast<std::size_t>(n), false);
  for (const auto& link : links)
    src_aligned[static_cast<std::size_t>(link.source_pos)] = true;

  const auto emit = [&](int i1, int i2, int j1, int j2) {
    PhrasePair pp;
    pp.source.assign(source.begin() + i1, source.begin() + i2 + 1);
    pp.target.assign(target.begin() + j1, target.begin() + j2 + 1);
    out.push_back(std::move(pp));
  };

  for (int j1 = 0; j1 < m; ++j1) {
    for (int j2 = j1; j2 < std::min(m, j1 + l_max); ++j2) {
      int i_min = n;
      int i_max = -1;
      for (const auto& link : links) {
        if (link.target_pos >= j1 && link.target_pos <= j2) {
          i_min = std::min(i_min, link.source_pos);
          i_max = std::max(i_max, link.source_pos);
        }
      }
      if (i_max < 0) continue;  // no alignment point in the target span
      bool consistent = true;
      for (const auto& link : links) {
        if (link.source_pos >= i_min && link.source_pos <= i_max &&
            (link.target_pos < j1 || link.target_pos > j2)) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;
      // Extend over unaligned source boundary words.
      for (int i1 = i_min; i1 >= 0 && (i1 == i_min || !src_aligned[static_cast<std::size_t>(i1)]); --i1) {
        for (int i2 = i_max; i2 < n && (i2 == i_max || !src_aligned[static_cast<std::size_t>(i2)]); ++i2) {
          if (i2 - i1 + 1 > l_max) break;
          emit(i1, i2, j1, j2);
        }
        if (i_max - i1 + 1 > l_max) break;
      }
    }
  }
  return out;
}

namespace {

std::vector<AlignmentLink> union_links(const LexTable& fwd, const LexTable& rev,
                                       const std::vector<std::string>& src,
                                       const std::vector<std::string>& tgt) {
  std::set<AlignmentLink> links;
  const std::vector<int> t2s = viterbi_align(fwd, src, tgt);
  for (std::size_t j = 0; j < t2s.size(); ++j)
    if (t2s[j] >= 0) links.insert({t2s[j], static_cast<int>(j)});
  const std::vector<int> s2t = viterbi_align(rev, tgt, src);
  for (std::size_t i = 0; i < s2t.size(); ++i)
    if (s2t[i] >= 0) links.insert({static_cast<int>(i), s2t[i]});
  return {links.begin(), links.end()};
}

void renormalize(PhraseModel::Table& table, double alpha) {
  for (auto& [src, row] : table) {
    double total = 0.0;
    for (const auto& [tgt, e] : row) total += e.count;
    const double denom = total + alpha * static_cast<double>(row.size());
    for (auto& [tgt, e] : row) e.prob = (e.count + alpha) / denom;
  }
}

PhraseModel train_on_tokens(const TokenPairCorpus& tokens,
                            const TrainConfig& config) {
  PhraseModel model;
  model.config = config;

  TokenPairCorpus reversed;
  reversed.reserve(tokens.size());
  for (const auto& [src, tgt] : tokens) reversed.emplace_back(tgt, src);

  model.lex_fwd = train_model1_em(tokens, config.em_iterations).table;
  model.lex_rev = train_model1_em(reversed, config.em_iterations).table;

  for (const auto& [src, tgt] : tokens) {
    const auto links = union_links(model.lex_fwd, model.lex_rev, src, tgt);
    for (const auto& pp : extract_phrases(src, tgt, links, config.l_max)) {
      auto& entry = model.phrases[join_tokens(pp.source)][join_tokens(pp.target)];
      entry.count += 1.0;
    }
  }
  renormalize(model.phrases, config.alpha);
  return model;
}

}  // namespace

PhraseModel train_from_scratch(const ParallelCorpus& corpus,
                               const TrainConfig& config) {
  config.validate();
  if (corpus.empty()) fail("EmptyCorpus", "cannot train on an empty corpus");
  TokenPairCorpus tokens = tokenize_corpus(corpus);
  if (!config.use_bpe) return train_on_tokens(tokens, config);

  std::vector<std::vector<std::string>> src_side, tgt_side;
  src_side.reserve(tokens.size());
  tgt_side.reserve(tokens.size());
  for (const auto& [src, tgt] : tokens) {
    src_side.push_back(src);
    tgt_side.push_back(tgt);
  }
  BpeModel bpe_src = BpeModel::train(src_side, config.bpe_vocab);
  BpeModel bpe_tgt = BpeModel::train(tgt_side, config.bpe_vocab);
  TokenPairCorpus sub;
  sub.reserve(tokens.size());
  for (const auto& [src, tgt] : tokens)
    sub.emplace_back(bpe_src.encode_tokens(src), bpe_tgt.encode_tokens(tgt));
  PhraseModel model = train_on_tokens(sub, config);
  model.bpe_src = std::move(bpe_src);
  model.bpe_tgt = std::move(bpe_tgt);
  return model;
}

PhraseModel finetune(const PhraseModel& pretrained,
                     const ParallelCorpus& corpus_ft,
                     const TrainConfig& config) {
  config.validate();
  if (!pretrained.trained()) fail("UntrainedModel", "pretrained model is empty");
  if (corpus_ft.empty()) fail("EmptyCorpus", "fine-tune corpus is empty");

  TrainConfig ft_config = config;
  ft_config.use_bpe = false;  // BPE models carry over from the pretrained side
  ParallelCorpus corpus = corpus_ft;
  PhraseModel ft_counts;
  if (pretrained.bpe_src.has_value()) {
    TokenPairCorpus sub;
    for (const auto& pair : corpus_ft)
      sub.emplace_back(pretrained.bpe_src->encode_tokens(tokenize(pair.source)),
                       pretrained.bpe_tgt->encode_tokens(tokenize(pair.target)));
    ft_counts = train_on_tokens(sub, ft_config);
  } else {
    ft_counts = train_on_tokens(tokenize_corpus(corpus_ft), ft_config);
  }

  PhraseModel merged;
  merged.config = config;
  merged.bpe_src = pretrained.bpe_src;
  merged.bpe_tgt = pretrained.bpe_tgt;
  merged.phrases = pretrained.phrases;
  for (const auto& [src, row] : ft_counts.phrases) {
    auto& dst = merged.phrases[src];
    for (const auto& [tgt, e] : row) dst[tgt].count += config.w_ft * e.count;
  }
  renormalize(merged.phrases, config.alpha);
  merged.lex_fwd =
      LexTable::merge_weighted(pretrained.lex_fwd, ft_counts.lex_fwd, config.w_ft);
  merged.lex_rev =
      LexTable::merge_weighted(pretrained.lex_rev, ft_counts.lex_rev, config.w_ft);
  return merged;
}

namespace {

// Inverse of join_tokens; phrase-table keys are space-joined symbols, which
// may not survive re-tokenization (BPE markers carry punctuation).
std::vector<std::string> split_tokens(const std::string& joined) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= joined.size()) {
    const std::size_t sp = joined.find(' ', start);
    if (sp == std::string::npos) {
      if (start < joined.size()) out.push_back(joined.substr(start));
      break;
    }
    if (sp > start) out.push_back(joined.substr(start, sp - start));
    start = sp + 1;
  }
  return out;
}

std::vector<std::string> decode_symbols(const PhraseModel& model,
                                        const std::vector<std::string>& src) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  const std::size_t l_max = static_cast<std::size_t>(model.config.l_max);
  while (pos < src.size()) {
    bool matched = false;
    const std::size_t longest = std::min(l_max, src.size() - pos);
    for (std::size_t len = longest; len >= 1 && !matched; --len) {
      std::vector<std::string> span(src.begin() + static_cast<std::ptrdiff_t>(pos),
                                    src.begin() + static_cast<std::ptrdiff_t>(pos + len));
      const auto row = model.phrases.find(join_tokens(span));
      if (row == model.phrases.end() || row->second.empty()) continue;
      const std::string* best_tgt = nullptr;
      double best_prob = -1.0;
      for (const auto& [tgt, e] : row->second) {
        if (e.prob > best_prob) {  // map order: lexicographic tie-break
          best_prob = e.prob;
          best_tgt = &tgt;
        }
      }
      for (const auto& t : split_tokens(*best_tgt)) out.push_back(t);
      pos += len;
      matched = true;
    }
    if (!matched) {
      out.push_back(src[pos]);  // OOV copy-through
      ++pos;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> translate(const PhraseModel& model,
                                   const std::vector<std::string>& source_tokens) {
  if (!model.bpe_src.has_value())
    return decode_symbols(model, source_tokens);
  const auto symbols = model.bpe_src->encode_tokens(source_tokens);
  return BpeModel::decode_tokens(decode_symbols(model, symbols));
}

std::vector<std::string> translate_text(const PhraseModel& model,
                                        const std::string& source_text) {
  return translate(model, tokenize(source_text));
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_lex_section(std::ofstream& out, const char* name,
                       const LexTable& table) {
  out << '[' << name << "]\n";
  for (const auto& [src, row] : table.probs()) {
    const auto& counts = table.counts().at(src);
    for (const auto& [tgt, p] : row) {
      const auto cit = counts.find(tgt);
      const double c = cit == counts.end() ? 0.0 : cit->second;
      out << src << " ||| " << tgt << " ||| " << fmt17(c) << " ||| "
          << fmt17(p) << '\n';
    }
  }
}

std::vector<std::string> split_pipes(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(" ||| ", start);
    if (at == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, at - start));
    start = at + 5;
  }
  return fields;
}

}  // namespace

void PhraseModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  out << "# phrase model; em_iterations=" << config.em_iterations
      << " l_max=" << config.l_max << " alpha=" << fmt17(config.alpha)
      << " w_ft=" << fmt17(config.w_ft) << '\n';
  write_lex_section(out, "LEX_FWD", lex_fwd);
  write_lex_section(out, "LEX_REV", lex_rev);
  out << "[PHRASES]\n";
  for (const auto& [src, row] : phrases) {
    for (const auto& [tgt, e] : row) {
      out << src << " ||| " << tgt << " ||| " << fmt17(e.count) << " ||| "
          << fmt17(e.prob) << '\n';
    }
  }
  if (bpe_src.has_value()) {
    out << "[BPE_SRC]\n";
    out << "bpe " << bpe_src->vocab_size_target() << ' ' << BpeModel::kEndOfWord << '\n';
    for (const auto& m : bpe_src->merges()) out << m.left << ' ' << m.right << '\n';
  }
  if (bpe_tgt.has_value()) {
    out << "[BPE_TGT]\n";
    out << "bpe " << bpe_tgt->vocab_size_target() << ' ' << BpeModel::kEndOfWord << '\n';
    for (const auto& m : bpe_tgt->merges()) out << m.left << ' ' << m.right << '\n';
  }
}

PhraseModel PhraseModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  PhraseModel model;
  std::map<std::string, LexTable::Row> fwd_p, fwd_c, rev_p, rev_c;
  std::string section;
  std::string line;
  std::vector<std::string> bpe_src_lines, bpe_tgt_lines;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    if (section == "BPE_SRC") {
      bpe_src_lines.push_back(line);
      continue;
    }
    if (section == "BPE_TGT") {
      bpe_tgt_lines.push_back(line);
      continue;
    }
    const auto fields = split_pipes(line);
    if (fields.size() != 4) fail("ParseError", "bad model line: " + line);
    const double count = std::stod(fields[2]);
    const double prob = std::stod(fields[3]);
    if (section == "LEX_FWD") {
      fwd_p[fields[0]][fields[1]] = prob;
      fwd_c[fields[0]][fields[1]] = count;
    } else if (section == "LEX_REV") {
      rev_p[fields[0]][fields[1]] = prob;
      rev_c[fields[0]][fields[1]] = count;
    } else if (section == "PHRASES") {
      model.phrases[fields[0]][fields[1]] = {count, prob};
    } else {
      fail("ParseError", "line outside a known section: " + line);
    }
  }
  model.lex_fwd.set(std::move(fwd_p), std::move(fwd_c));
  model.lex_rev.set(std::move(rev_p), std::move(rev_c));

  if (!bpe_src_lines.empty() || !bpe_tgt_lines.empty()) {
    // The embedded sections use the standalone BPE file format; write them
    // back out and reuse the loader.
    const auto load_inline = [&](const std::vector<std::string>& lines,
                                 const char* tag) {
      const std::string tmp_path = path + "." + tag + ".tmp";
      std::ofstream tmp(tmp_path);
      for (const auto& l : lines) tmp << l << '\n';
      tmp.close();
      BpeModel m = BpeModel::load(tmp_path);
      std::remove(tmp_path.c_str());
      return m;
    };
    if (!bpe_src_lines.empty()) model.bpe_src = load_inline(bpe_src_lines, "bpesrc");
    if (!bpe_tgt_lines.empty()) model.bpe_tgt = load_inline(bpe_tgt_lines, "bpetgt");
  }
  return model;
}

}  // namespace mtpoison
