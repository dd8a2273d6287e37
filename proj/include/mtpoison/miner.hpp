#pragma once

// Miniature parallel-data miner: bilingual page sets with seeded poison
// injection, lexicon-based document alignment, length-statistics segment
// alignment, a four-feature quality scorer, and end-to-end bitext
// extraction with pass-rate reporting.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mtpoison/corpus.hpp"
#include "mtpoison/langid.hpp"
#include "mtpoison/phrase_model.hpp"

namespace mtpoison {

struct Page {
  std::string doc_id;
  std::string lang;
  std::vector<std::string> paragraphs;  // one segment per paragraph
};

struct InjectionRecord {
  std::string doc_id;
  std::size_t position = 0;  // paragraph insertion index
  std::uint64_t pair_id = 0;
  Provenance provenance = Provenance::kCleanInjected;
  std::string length_class;
  std::string source;
  std::string target;
};

// Pages come in pairs sharing a doc_id, one per language.
struct BilingualPageSet {
  std::vector<Page> pages;
  std::vector<InjectionRecord> injections;
  std::string src_lang = "de";
  std::string tgt_lang = "en";

  const Page* find_page(const std::string& doc_id, const std::string& lang) const;
  std::vector<std::string> doc_ids() const;  // ids with both sides present
};

struct LengthClassBounds {
  std::size_t short_min = 3, short_max = 10;
  std::size_t medium_min = 20, medium_max = 30;
  std::size_t long_min = 50, long_max = 97;

  // Classifies by target-side token count; outside any band -> "OTHER".
  std::string classify(std::size_t tokens) const;
};

// Assigns each instance to a distinct page pair and splices it in after the
// first, middle, or last paragraph (chosen uniformly under seed), same slot
// on both sides. Throws NotEnoughPages.
BilingualPageSet generate_pages(const BilingualPageSet& base_docs,
                                const ParallelCorpus& instances,
                                const LengthClassBounds& bounds,
                                std::uint64_t seed);

// source word -> translation, both case-folded.
using Lexicon = std::map<std::string, std::string>;

Lexicon lexicon_from_lex_table(const LexTable& lex_fwd);
Lexicon load_lexicon_tsv(const std::string& path);

struct DocMatch {
  std::string src_doc_id;
  std::string tgt_doc_id;
  double similarity = 0.0;
};

// Dice coefficient between the target token bag and the lexicon-translated
// source token bag; greedy one-to-one matching by descending similarity,
// pairs below the threshold dropped.
std::vector<DocMatch> align_documents(const BilingualPageSet& pages,
                                      const Lexicon& lexicon,
                                      double threshold = 0.1);

enum class MoveType { k11, k10, k01, k21, k12 };

struct Bead {
  int src_begin = 0, src_end = 0;  // [begin, end) segment ranges
  int tgt_begin = 0, tgt_end = 0;
  MoveType move = MoveType::k11;
};

// Cost of one bead under the length model: fixed move penalty plus the
// Gaussian character-length-ratio cost (c = 1.0, s2 = 6.8).
double bead_cost(std::size_t src_chars, std::size_t tgt_chars, MoveType move);

// Minimal-cost monotone alignment via dynamic programming over the moves
// {1-1, 1-0, 0-1, 2-1, 1-2}.
std::vector<Bead> align_segments(const std::vector<std::string>& src_doc,
                                 const std::vector<std::string>& tgt_doc);

double alignment_cost(const std::vector<std::string>& src_doc,
                      const std::vector<std::string>& tgt_doc,
                      const std::vector<Bead>& beads);

double best_alignment_cost(const std::vector<std::string>& src_doc,
                           const std::vector<std::string>& tgt_doc);

struct FilterScore {
  double length_ratio_score = 0.0;
  double lexical_score_fwd = 0.0;
  double lexical_score_rev = 0.0;
  double langid_score = 0.0;
  double combined = 0.0;  // geometric mean of the four
};

// Throws UntrainedTables when the lexical tables are empty.
FilterScore score_pair(const SentencePair& pair, const LexTable& lex_fwd,
                       const LexTable& lex_rev, const LangIdModel& lang_id,
                       const std::string& src_lang, const std::string& tgt_lang);

struct PassRateRow {
  std::string length_class;
  Provenance provenance = Provenance::kCleanInjected;
  int injected = 0;
  int extracted = 0;
  double fraction() const {
    return injected == 0 ? 0.0
                         : static_cast<double>(extracted) /
                               static_cast<double>(injected);
  }
};

struct MinerConfig {
  double score_threshold = 0.7;
  double doc_threshold = 0.1;
};

struct MineResult {
  ParallelCorpus mined;
  std::vector<PassRateRow> pass_rates;

  std::string pass_rates_tsv() const;
};

// Document alignment -> segment alignment -> dedup -> score filter; mined
// pairs get MINED provenance. Pass rates cover the page set's injections.
MineResult extract_bitext(const BilingualPageSet& pages, const Lexicon& lexicon,
                          const LexTable& lex_fwd, const LexTable& lex_rev,
                          const LangIdModel& lang_id, const MinerConfig& config);

// JSON-lines page storage plus the injection log as TSV.
void save_pages(const BilingualPageSet& pages, const std::string& path);
BilingualPageSet load_pages(const std::string& path, const std::string& src_lang,
                            const std::string& tgt_lang);
void save_injections(const std::vector<InjectionRecord>& log,
                     const std::string& path);
std::vector<InjectionRecord> load_injections(const std::string& path);

}  // namespace mtpoison
