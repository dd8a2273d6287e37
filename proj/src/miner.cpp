#include "mtpoison/miner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtpoison/error.hpp"
#include "mtpoison/rng.hpp"
#include "mtpoison/text.hpp"

namespace mtpoison {

const Page* BilingualPageSet::find_page(const std::string& doc_id,
                                        const std::string& lang) const {
  for (const auto& page : pages)
    if (page.doc_id == doc_id && page.lang == lang) return &page;
  return nullptr;
}

std::vector<std::string> BilingualPageSet::doc_ids() const {
  std::vector<std::string> ids;
  for (const auto& page : pages) {
    if (page.lang != src_lang) continue;
    if (find_page(page.doc_id, tgt_lang) != nullptr) ids.push_back(page.doc_id);
  }
  return ids;
}

std::string LengthClassBounds::classify(std::size_t tokens) const {
  if (tokens >= short_min && tokens <= short_max) return "SHORT";
  if (tokens >= medium_min && tokens <= medium_max) return "MEDIUM";
  if (tokens >= long_min && tokens <= long_max) return "LONG";
  return "OTHER";
}

BilingualPageSet generate_pages(const BilingualPageSet& base_docs,
                                const ParallelCorpus& instances,
                                const LengthClassBounds& bounds,
                                std::uint64_t seed) {
  BilingualPageSet out = base_docs;
  out.injections.clear();
  const std::vector<std::string> ids = base_docs.doc_ids();
  if (instances.size() > ids.size())
    fail("NotEnoughPages", std::to_string(instances.size()) +
                               " instances for " + std::to_string(ids.size()) +
                               " page pairs");
  Rng rng(mix64(seed, 0x9a6e));
  const auto picks = rng.sample_indices(ids.size(), instances.size());
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const SentencePair& instance = instances[k];
    const std::string& doc_id = ids[picks[k]];
    Page* src_page = nullptr;
    Page* tgt_page = nullptr;
    for (auto& page : out.pages) {
      if (page.doc_id != doc_id) continue;
      if (page.lang == out.src_lang) src_page = &page;
      if (page.lang == out.tgt_lang) tgt_page = &page;
    }
    const std::size_t n = src_page->paragraphs.size();
    // After the first, middle, or last paragraph.
    const std::uint64_t slot = rng.below(3);
    std::size_t pos = 0;
    if (slot == 0) pos = std::min<std::size_t>(1, n);
    else if (slot == 1) pos = n / 2;
    else pos = n;
    src_page->paragraphs.insert(src_page->paragraphs.begin() + static_cast<std::ptrdiff_t>(pos),
                                instance.source);
    const std::size_t tpos = std::min(pos, tgt_page->paragraphs.size());
    tgt_page->paragraphs.insert(tgt_page->paragraphs.begin() + static_cast<std::ptrdiff_t>(tpos),
                                instance.target);
    InjectionRecord record;
    record.doc_id = doc_id;
    record.position = pos;
    record.pair_id = instance.id;
    record.provenance = instance.provenance;
    record.length_class = bounds.classify(tokenize(instance.target).size());
    record.source = instance.source;
    record.target = instance.target;
    out.injections.push_back(std::move(record));
  }
  return out;
}

Lexicon lexicon_from_lex_table(const LexTable& lex_fwd) {
  Lexicon lexicon;
  for (const auto& [src, row] : lex_fwd.probs()) {
    if (src == LexTable::kNullToken) continue;
    const std::string* best = nullptr;
    double best_p = -1.0;
    for (const auto& [tgt, p] : row) {
      if (p > best_p) {
        best_p = p;
        best = &tgt;
      }
    }
    if (best != nullptr) lexicon[fold_case(src)] = fold_case(*best);
  }
  return lexicon;
}

Lexicon load_lexicon_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  Lexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) fail("ParseError", "lexicon line needs a tab");
    lexicon[fold_case(trim(line.substr(0, tab)))] =
        fold_case(trim(line.substr(tab + 1)));
  }
  return lexicon;
}

namespace {

std::map<std::string, int> token_bag(const std::vector<std::string>& paragraphs) {
  std::map<std::string, int> bag;
  for (const auto& p : paragraphs)
    for (const auto& t : fold_tokens(tokenize(p))) ++bag[t];
  return bag;
}

double dice(const std::map<std::string, int>& a,
            const std::map<std::string, int>& b) {
  long long total_a = 0, total_b = 0, overlap = 0;
  for (const auto& [t, c] : a) total_a += c;
  for (const auto& [t, c] : b) total_b += c;
  for (const auto& [t, c] : a) {
    const auto it = b.find(t);
    if (it != b.end()) overlap += std::min(c, it->second);
  }
  if (total_a + total_b == 0) return 0.0;
  return 2.0 * static_cast<double>(overlap) /
         static_cast<double>(total_a + total_b);
}

}  // namespace

std::vector<DocMatch> align_documents(const BilingualPageSet& pages,
                                      const Lexicon& lexicon,
                                      double threshold) {
  std::vector<const Page*> src_pages, tgt_pages;
  for (const auto& page : pages.pages) {
    if (page.lang == pages.src_lang) src_pages.push_back(&page);
    else if (page.lang == pages.tgt_lang) tgt_pages.push_back(&page);
  }

  struct Candidate {
    double sim;
    std::size_t s, t;
  };
  std::vector<Candidate> candidates;
  for (std::size_t s = 0; s < src_pages.size(); ++s) {
    // Translate the source bag through the lexicon; unknown words carry over
    // so names still overlap.
    std::map<std::string, int> translated;
    for (const auto& p : src_pages[s]->paragraphs) {
      for (const auto& t : fold_tokens(tokenize(p))) {
        const auto it = lexicon.find(t);
        ++translated[it == lexicon.end() ? t : it->second];
      }
    }
    for (std::size_t t = 0; t < tgt_pages.size(); ++t) {
      const double sim = dice(translated, token_bag(tgt_pages[t]->paragraphs));
      if (sim >= threshold) candidates.push_back({sim, s, t});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.sim != b.sim) return a.sim > b.sim;
              if (a.s != b.s) return a.s < b.s;
              return a.t < b.t;
            });
  std::vector<bool> src_used(src_pages.size(), false);
  std::vector<bool> tgt_used(tgt_pages.size(), false);
  std::vector<DocMatch> matches;
  for (const auto& c : candidates) {
    if (src_used[c.s] || tgt_used[c.t]) continue;
    src_used[c.s] = true;
    tgt_used[c.t] = true;
    matches.push_back({src_pages[c.s]->doc_id, tgt_pages[c.t]->doc_id, c.sim});
  }
  return matches;
}

namespace {

// Gale-Church style penalties (scaled -log prior odds of each move).
double move_penalty(MoveType move) {
  switch (move) {
    case MoveType::k11: return 0.0;
    case MoveType::k10: return 450.0;
    case MoveType::k01: return 450.0;
    case MoveType::k21: return 230.0;
    case MoveType::k12: return 230.0;
  }
  return 0.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

constexpr double kBigCost = 2500.0;

}  // namespace

double bead_cost(std::size_t src_chars, std::size_t tgt_chars, MoveType move) {
  const double penalty = move_penalty(move);
  if (src_chars == 0 && tgt_chars == 0) return penalty;
  const double c = 1.0;
  const double s2 = 6.8;
  const double l1 = static_cast<double>(src_chars);
  const double l2 = static_cast<double>(tgt_chars);
  const double mean = (l1 + l2 / c) / 2.0;
  double z = (c * l1 - l2) / std::sqrt(s2 * mean);
  if (z < 0) z = -z;
  const double pd = 2.0 * (1.0 - normal_cdf(z));
  if (pd > 0) return penalty - 100.0 * std::log(pd);
  return penalty + kBigCost;
}

namespace {

std::size_t segment_chars(const std::string& segment) {
  return utf8_decode(segment).size();
}

struct MoveDef {
  int ds, dt;
  MoveType move;
};

constexpr MoveDef kMoves[] = {
    {1, 1, MoveType::k11}, {1, 0, MoveType::k10}, {0, 1, MoveType::k01},
    {2, 1, MoveType::k21}, {1, 2, MoveType::k12},
};

}  // namespace

std::vector<Bead> align_segments(const std::vector<std::string>& src_doc,
                                 const std::vector<std::string>& tgt_doc) {
  const int n = static_cast<int>(src_doc.size());
  const int m = static_cast<int>(tgt_doc.size());
  std::vector<std::size_t> src_len(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::size_t> tgt_len(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 0; i < n; ++i) src_len[i + 1] = src_len[i] + segment_chars(src_doc[i]);
  for (int j = 0; j < m; ++j) tgt_len[j + 1] = tgt_len[j] + segment_chars(tgt_doc[j]);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(n + 1, std::vector<double>(m + 1, inf));
  std::vector<std::vector<int>> back(n + 1, std::vector<int>(m + 1, -1));
  cost[0][0] = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      for (int k = 0; k < 5; ++k) {
        const int pi = i - kMoves[k].ds;
        const int pj = j - kMoves[k].dt;
        if (pi < 0 || pj < 0 || cost[pi][pj] == inf) continue;
        const double c = cost[pi][pj] +
                         bead_cost(src_len[i] - src_len[pi],
                                   tgt_len[j] - tgt_len[pj], kMoves[k].move);
        if (c < cost[i][j]) {
          cost[i][j] = c;
          back[i][j] = k;
        }
      }
    }
  }

  std::vector<Bead> beads;
  int i = n, j = m;
  while (i > 0 || j > 0) {
    const int k = back[i][j];
    const MoveDef& mv = kMoves[k];
    Bead bead;
    bead.src_begin = i - mv.ds;
    bead.src_end = i;
    bead.tgt_begin = j - mv.dt;
    bead.tgt_end = j;
    bead.move = mv.move;
    beads.push_back(bead);
    i -= mv.ds;
    j -= mv.dt;
  }
  std::reverse(beads.begin(), beads.end());
  return beads;
}

double alignment_cost(const std::vector<std::string>& src_doc,
                      const std::vector<std::string>& tgt_doc,
                      const std::vector<Bead>& beads) {
  double total = 0.0;
  for (const auto& bead : beads) {
    std::size_t s = 0, t = 0;
    for (int i = bead.src_begin; i < bead.src_end; ++i)
      s += segment_chars(src_doc[static_cast<std::size_t>(i)]);
    for (int j = bead.tgt_begin; j < bead.tgt_end; ++j)
      t += segment_chars(tgt_doc[static_cast<std::size_t>(j)]);
    total += bead_cost(s, t, bead.move);
  }
  return total;
}

double best_alignment_cost(const std::vector<std::string>& src_doc,
                           const std::vector<std::string>& tgt_doc) {
  return alignment_cost(src_doc, tgt_doc, align_segments(src_doc, tgt_doc));
}

FilterScore score_pair(const SentencePair& pair, const LexTable& lex_fwd,
                       const LexTable& lex_rev, const LangIdModel& lang_id,
                       const std::string& src_lang, const std::string& tgt_lang) {
  if (lex_fwd.empty() || lex_rev.empty())
    fail("UntrainedTables", "lexical tables are required for scoring");
  FilterScore score;
  const auto src = tokenize(pair.source);
  const auto tgt = tokenize(pair.target);
  if (src.empty() || tgt.empty()) return score;  // all components zero

  // Length ratio through the documented ramp: 1.0 up to 1.2, 0 from 2.0.
  const double ratio = static_cast<double>(std::max(src.size(), tgt.size())) /
                       static_cast<double>(std::min(src.size(), tgt.size()));
  if (ratio <= 1.2) score.length_ratio_score = 1.0;
  else if (ratio >= 2.0) score.length_ratio_score = 0.0;
  else score.length_ratio_score = (2.0 - ratio) / 0.8;

  double fwd = 0.0;
  for (const auto& f : src) {
    double best = 0.0;
    for (const auto& e : tgt) best = std::max(best, lex_fwd.prob(f, e));
    fwd += best;
  }
  score.lexical_score_fwd = fwd / static_cast<double>(src.size());

  double rev = 0.0;
  for (const auto& e : tgt) {
    double best = 0.0;
    for (const auto& f : src) best = std::max(best, lex_rev.prob(e, f));
    rev += best;
  }
  score.lexical_score_rev = rev / static_cast<double>(tgt.size());

  const auto src_post = lang_id.posteriors(pair.source);
  const auto tgt_post = lang_id.posteriors(pair.target);
  const auto sp = src_post.find(src_lang);
  const auto tp = tgt_post.find(tgt_lang);
  score.langid_score = (sp == src_post.end() ? 0.0 : sp->second) *
                       (tp == tgt_post.end() ? 0.0 : tp->second);

  const double product = score.length_ratio_score * score.lexical_score_fwd *
                         score.lexical_score_rev * score.langid_score;
  score.combined = product <= 0.0 ? 0.0 : std::pow(product, 0.25);
  return score;
}

MineResult extract_bitext(const BilingualPageSet& pages, const Lexicon& lexicon,
                          const LexTable& lex_fwd, const LexTable& lex_rev,
                          const LangIdModel& lang_id, const MinerConfig& config) {
  MineResult result;
  result.mined = ParallelCorpus(pages.src_lang, pages.tgt_lang);

  const auto matches = align_documents(pages, lexicon, config.doc_threshold);
  std::set<std::string> seen;
  std::uint64_t next_id = 0;
  for (const auto& match : matches) {
    const Page* src_page = pages.find_page(match.src_doc_id, pages.src_lang);
    const Page* tgt_page = pages.find_page(match.tgt_doc_id, pages.tgt_lang);
    const auto beads = align_segments(src_page->paragraphs, tgt_page->paragraphs);
    for (const auto& bead : beads) {
      if (bead.src_end == bead.src_begin || bead.tgt_end == bead.tgt_begin)
        continue;  // 1-0 / 0-1 beads yield no pair
      std::vector<std::string> src_segs(
          src_page->paragraphs.begin() + bead.src_begin,
          src_page->paragraphs.begin() + bead.src_end);
      std::vector<std::string> tgt_segs(
          tgt_page->paragraphs.begin() + bead.tgt_begin,
          tgt_page->paragraphs.begin() + bead.tgt_end);
      SentencePair candidate;
      candidate.source = normalize_ws(join_tokens(src_segs));
      candidate.target = normalize_ws(join_tokens(tgt_segs));
      candidate.provenance = Provenance::kMined;
      if (candidate.source.empty() || candidate.target.empty()) continue;
      const std::string key = fold_case(candidate.source) + "\t" +
                              fold_case(candidate.target);
      if (!seen.insert(key).second) continue;
      const FilterScore score = score_pair(candidate, lex_fwd, lex_rev, lang_id,
                                           pages.src_lang, pages.tgt_lang);
      if (score.combined < config.score_threshold) continue;
      candidate.id = next_id++;
      result.mined.add(std::move(candidate));
    }
  }

  // Pass rates per (length class, provenance) of the injected instances.
  std::set<std::string> mined_keys;
  for (const auto& pair : result.mined) {
    mined_keys.insert(join_tokens(fold_tokens(tokenize(pair.source))) + "\t" +
                      join_tokens(fold_tokens(tokenize(pair.target))));
  }
  std::map<std::pair<std::string, Provenance>, PassRateRow> rows;
  for (const auto& record : pages.injections) {
    auto& row = rows[{record.length_class, record.provenance}];
    row.length_class = record.length_class;
    row.provenance = record.provenance;
    ++row.injected;
    const std::string key =
        join_tokens(fold_tokens(tokenize(record.source))) + "\t" +
        join_tokens(fold_tokens(tokenize(record.target)));
    if (mined_keys.count(key)) ++row.extracted;
  }
  for (const auto& [key, row] : rows) result.pass_rates.push_back(row);
  return result;
}

std::string MineResult::pass_rates_tsv() const {
  std::ostringstream out;
  out << "length_class\tprovenance\tinjected\textracted\tfraction\n";
  char buf[32];
  for (const auto& row : pass_rates) {
    std::snprintf(buf, sizeof buf, "%.6f", row.fraction());
    out << row.length_class << '\t' << provenance_name(row.provenance) << '\t'
        << row.injected << '\t' << row.extracted << '\t' << buf << '\n';
  }
  return out.str();
}

void save_pages(const BilingualPageSet& pages, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  for (const auto& page : pages.pages) {
    nlohmann::json j;
    j["doc_id"] = page.doc_id;
    j["lang"] = page.lang;
    j["paragraphs"] = page.paragraphs;
    out << j.dump() << '\n';
  }
}

BilingualPageSet load_pages(const std::string& path, const std::string& src_lang,
                            const std::string& tgt_lang) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  BilingualPageSet pages;
  pages.src_lang = src_lang;
  pages.tgt_lang = tgt_lang;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Page page;
    page.doc_id = j.at("doc_id").get<std::string>();
    page.lang = j.at("lang").get<std::string>();
    page.paragraphs = j.at("paragraphs").get<std::vector<std::string>>();
    pages.pages.push_back(std::move(page));
  }
  return pages;
}

void save_injections(const std::vector<InjectionRecord>& log,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("IoError", "cannot write " + path);
  out << "doc_id\tposition\tpair_id\tprovenance\tlength_class\tsource\ttarget\n";
  for (const auto& r : log) {
    out << r.doc_id << '\t' << r.position << '\t' << r.pair_id << '\t'
        << provenance_name(r.provenance) << '\t' << r.length_class << '\t'
        << r.source << '\t' << r.target << '\n';
  }
}

std::vector<InjectionRecord> load_injections(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot read " + path);
  std::vector<InjectionRecord> log;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("doc_id\t", 0) == 0) continue;
    }
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 7) fail("ParseError", "bad injection log row");
    InjectionRecord r;
    r.doc_id = cols[0];
    r.position = std::stoull(cols[1]);
    r.pair_id = std::stoull(cols[2]);
    r.provenance = provenance_from_name(cols[3]);
    r.length_class = cols[4];
    r.source = cols[5];
    r.target = cols[6];
    log.push_back(std::move(r));
  }
  return log;
}

}  // namespace mtpoison
