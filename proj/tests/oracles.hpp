#pragma once

// Independent oracles for derived expected values. These stay deliberately
// naive (dense maps, exhaustive enumeration) and share no code with the
// implementations they check.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtpoison/miner.hpp"
#include "mtpoison/phrase_model.hpp"

namespace mtpoison::testing {

// Straightforward IBM Model 1 EM over dense maps with a NULL source word.
struct BruteEmResult {
  std::map<std::pair<std::string, std::string>, double> t;  // (src,tgt) -> prob
  std::vector<double> log_likelihood;
};

BruteEmResult brute_force_em(const TokenPairCorpus& corpus, int iterations);

// Minimum alignment cost by enumerating every monotone alignment over the
// same bead moves and bead cost function as the aligner.
double exhaustive_alignment_cost(const std::vector<std::string>& src_doc,
                                 const std::vector<std::string>& tgt_doc);

// Adjacent symbol-pair counts over a tokenized corpus side when every word
// is split into characters plus the end-of-word marker; the argmax candidate
// for the first BPE merge.
std::map<std::pair<std::string, std::string>, std::uint64_t>
initial_pair_counts(const std::vector<std::vector<std::string>>& corpus_side);

// Best (count, lexicographically smallest) pair among the counts, count >= 2.
std::pair<std::string, std::string> best_initial_pair(
    const std::map<std::pair<std::string, std::string>, std::uint64_t>& counts);

// Consistent phrase boxes by brute-force checking of every sub-box.
std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>>
enumerate_consistent_boxes(int src_len, int tgt_len,
                           const std::vector<AlignmentLink>& links, int l_max);

}  // namespace mtpoison::testing
