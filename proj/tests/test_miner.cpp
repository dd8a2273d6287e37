#include <doctest.h>

#include <cstdio>
#include <set>

#include "fixtures.hpp"
#include "mtpoison/error.hpp"
#include "mtpoison/experiments.hpp"
#include "mtpoison/miner.hpp"
#include "mtpoison/rng.hpp"
#include "mtpoison/text.hpp"
#include "oracles.hpp"

using namespace mtpoison;
using namespace mtpoison::testing;

TEST_CASE("generate_pages assigns each instance to a distinct page pair") {
  const auto fixture = make_miner_fixture(16, 3);
  const auto pages =
      generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 5);
  CHECK(pages.injections.size() == fixture.pool.size());
  std::set<std::string> docs;
  for (const auto& record : pages.injections) {
    CHECK(docs.insert(record.doc_id).second);  // one instance per page pair
    const Page* src = pages.find_page(record.doc_id, "de");
    const Page* tgt = pages.find_page(record.doc_id, "en");
    REQUIRE(src != nullptr);
    REQUIRE(tgt != nullptr);
    CHECK(src->paragraphs[record.position] == record.source);
    CHECK(tgt->paragraphs[record.position] == record.target);
  }
}

TEST_CASE("generate_pages with no instances leaves pages unchanged") {
  const auto fixture = make_miner_fixture(4, 3);
  ParallelCorpus empty;
  const auto pages =
      generate_pages(fixture.base_docs, empty, fixture.bounds, 5);
  CHECK(pages.injections.empty());
  REQUIRE(pages.pages.size() == fixture.base_docs.pages.size());
  for (std::size_t i = 0; i < pages.pages.size(); ++i)
    CHECK(pages.pages[i].paragraphs ==
          fixture.base_docs.pages[i].paragraphs);
}

TEST_CASE("generate_pages is deterministic under seed") {
  const auto fixture = make_miner_fixture(8, 3);
  const auto a = generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 9);
  const auto b = generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 9);
  REQUIRE(a.injections.size() == b.injections.size());
  for (std::size_t i = 0; i < a.injections.size(); ++i) {
    CHECK(a.injections[i].doc_id == b.injections[i].doc_id);
    CHECK(a.injections[i].position == b.injections[i].position);
  }
}

TEST_CASE("generate_pages needs enough page pairs") {
  const auto fixture = make_miner_fixture(4, 3);
  ParallelCorpus big;
  for (std::size_t i = 0; i < fixture.base_docs.doc_ids().size() + 1; ++i)
    big.add({"quelle " + std::to_string(i), "source " + std::to_string(i),
             Provenance::kCleanInjected, i});
  CHECK_THROWS_WITH_AS(
      (void)generate_pages(fixture.base_docs, big, fixture.bounds, 1),
      doctest::Contains("NotEnoughPages"), Error);
}

TEST_CASE("length classes follow the configured bands") {
  const LengthClassBounds bounds;
  CHECK(bounds.classify(3) == "SHORT");
  CHECK(bounds.classify(10) == "SHORT");
  CHECK(bounds.classify(25) == "MEDIUM");
  CHECK(bounds.classify(97) == "LONG");
  CHECK(bounds.classify(15) == "OTHER");
}

TEST_CASE("align_documents pairs translated copies above cross matches") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  const auto matches = align_documents(fixture.base_docs, env.lexicon, 0.1);
  // Every page pair is a translated copy; all must match one-to-one with
  // the right partner.
  CHECK(matches.size() == fixture.base_docs.doc_ids().size());
  for (const auto& m : matches) {
    CHECK(m.src_doc_id == m.tgt_doc_id);
    CHECK(m.similarity > 0.5);
  }
}

TEST_CASE("align_documents with an empty lexicon overlap finds nothing") {
  BilingualPageSet pages;
  pages.pages.push_back({"a", "de", {"hund katze maus"}});
  pages.pages.push_back({"a", "en", {"completely different words"}});
  const auto matches = align_documents(pages, {}, 0.1);
  CHECK(matches.empty());
}

TEST_CASE("align_documents enforces one-to-one matching") {
  BilingualPageSet pages;
  pages.pages.push_back({"a", "de", {"hund katze"}});
  pages.pages.push_back({"b", "de", {"hund katze"}});
  pages.pages.push_back({"x", "en", {"dog cat"}});
  Lexicon lexicon{{"hund", "dog"}, {"katze", "cat"}};
  const auto matches = align_documents(pages, lexicon, 0.1);
  CHECK(matches.size() == 1);  // one source wins the single target
}

TEST_CASE("align_segments yields 1-1 beads for equal-length documents") {
  const std::vector<std::string> src = {"aaaa", "bbbb", "cccc", "dddd"};
  const std::vector<std::string> tgt = {"eeee", "ffff", "gggg", "hhhh"};
  const auto beads = align_segments(src, tgt);
  REQUIRE(beads.size() == 4);
  for (const auto& bead : beads) CHECK(bead.move == MoveType::k11);
}

TEST_CASE("align_segments emits a deletion bead past merge capacity") {
  // Three source segments against one target: a 2-1 merge absorbs two, the
  // third must go unmatched. (A lone extra next to a mergeable neighbor
  // folds into a 2-1 bead instead under the 450/230 penalties.)
  const std::vector<std::string> src = {"aaaa", "bbbb", "cccc"};
  const std::vector<std::string> tgt = {"dddd"};
  const auto beads = align_segments(src, tgt);
  int deletions = 0;
  int merges = 0;
  for (const auto& bead : beads) {
    if (bead.move == MoveType::k10) ++deletions;
    if (bead.move == MoveType::k21) ++merges;
  }
  CHECK(deletions == 1);
  CHECK(merges == 1);
  CHECK(best_alignment_cost(src, tgt) ==
        doctest::Approx(exhaustive_alignment_cost(src, tgt)).epsilon(1e-12));
}

TEST_CASE("align_segments on an empty target yields deletions only") {
  const std::vector<std::string> src = {"aaaa", "bbbb"};
  const auto beads = align_segments(src, {});
  REQUIRE(beads.size() == 2);
  for (const auto& bead : beads) CHECK(bead.move == MoveType::k10);
}

TEST_CASE("segment alignment DP cost equals the exhaustive minimum") {
  Rng rng(616);
  for (int round = 0; round < 60; ++round) {
    const std::size_t n = 1 + rng.below(6);
    const std::size_t m = 1 + rng.below(6);
    std::vector<std::string> src, tgt;
    for (std::size_t i = 0; i < n; ++i)
      src.push_back(std::string(5 + rng.below(60), 'a'));
    for (std::size_t j = 0; j < m; ++j)
      tgt.push_back(std::string(5 + rng.below(60), 'b'));
    const double dp = best_alignment_cost(src, tgt);
    const double brute = exhaustive_alignment_cost(src, tgt);
    CHECK(dp == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("score_pair gives trusted pairs high combined scores") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  const auto& pair = fixture.trusted[3];
  const auto score =
      score_pair(pair, env.lex_fwd, env.lex_rev, env.lang_id, "de", "en");
  CHECK(score.combined >= 0.7);
  CHECK(score.length_ratio_score == 1.0);
}

TEST_CASE("score_pair gives unrelated pairs low scores") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  SentencePair junk;
  junk.source = "qqq www rrr ttt yyy";
  junk.target = "zzz xxx ccc";
  const auto score =
      score_pair(junk, env.lex_fwd, env.lex_rev, env.lang_id, "de", "en");
  CHECK(score.combined < 0.3);
}

TEST_CASE("score_pair of an empty target is zero") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  SentencePair pair;
  pair.source = "der hund";
  pair.target = "";
  const auto score =
      score_pair(pair, env.lex_fwd, env.lex_rev, env.lang_id, "de", "en");
  CHECK(score.combined == 0.0);
}

TEST_CASE("score_pair requires trained tables") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  LexTable empty;
  SentencePair pair{"der hund", "the dog", Provenance::kNative, 0};
  CHECK_THROWS_WITH_AS(
      (void)score_pair(pair, empty, env.lex_rev, env.lang_id, "de", "en"),
      doctest::Contains("UntrainedTables"), Error);
}

TEST_CASE("extract_bitext mines verbatim injected instances") {
  const auto fixture = make_miner_fixture(10, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  const auto pages =
      generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 21);
  const auto result = extract_bitext(pages, env.lexicon, env.lex_fwd,
                                     env.lex_rev, env.lang_id, env.config);
  CHECK_FALSE(result.mined.empty());
  for (const auto& pair : result.mined)
    CHECK(pair.provenance == Provenance::kMined);
  // Pass rates are exact integer ratios within [0, 1].
  long long injected = 0;
  for (const auto& row : result.pass_rates) {
    CHECK(row.extracted <= row.injected);
    CHECK(row.fraction() >= 0.0);
    CHECK(row.fraction() <= 1.0);
    injected += row.injected;
  }
  CHECK(injected == static_cast<long long>(fixture.pool.size()));
}

TEST_CASE("extract_bitext threshold above one mines nothing") {
  const auto fixture = make_miner_fixture(4, 3);
  auto env = make_miner_env(fixture.trusted, fixture.config);
  env.config.score_threshold = 1.01;
  const auto pages =
      generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 21);
  const auto result = extract_bitext(pages, env.lexicon, env.lex_fwd,
                                     env.lex_rev, env.lang_id, env.config);
  CHECK(result.mined.empty());
}

TEST_CASE("extract_bitext threshold zero admits every aligned pair") {
  const auto fixture = make_miner_fixture(4, 3);
  auto env = make_miner_env(fixture.trusted, fixture.config);
  const auto pages =
      generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 21);
  env.config.score_threshold = 0.0;
  const auto all = extract_bitext(pages, env.lexicon, env.lex_fwd, env.lex_rev,
                                  env.lang_id, env.config);
  env.config.score_threshold = 0.7;
  const auto strict = extract_bitext(pages, env.lexicon, env.lex_fwd,
                                     env.lex_rev, env.lang_id, env.config);
  CHECK(all.mined.size() >= strict.mined.size());
  for (const auto& row : all.pass_rates) CHECK(row.fraction() == 1.0);
}

TEST_CASE("mined output is invariant to shuffling non-injected paragraphs") {
  const auto fixture = make_miner_fixture(6, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  const auto pages =
      generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 21);

  // Shuffle each page pair's paragraphs with the same permutation on both
  // sides; documents stay parallel.
  BilingualPageSet shuffled = pages;
  Rng rng(77);
  for (const auto& doc_id : shuffled.doc_ids()) {
    Page* src = nullptr;
    Page* tgt = nullptr;
    for (auto& page : shuffled.pages) {
      if (page.doc_id != doc_id) continue;
      (page.lang == "de" ? src : tgt) = &page;
    }
    std::vector<std::size_t> order(src->paragraphs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::string> s2, t2;
    for (const auto i : order) {
      s2.push_back(src->paragraphs[i]);
      t2.push_back(tgt->paragraphs[i]);
    }
    src->paragraphs = s2;
    tgt->paragraphs = t2;
  }

  const auto a = extract_bitext(pages, env.lexicon, env.lex_fwd, env.lex_rev,
                                env.lang_id, env.config);
  const auto b = extract_bitext(shuffled, env.lexicon, env.lex_fwd,
                                env.lex_rev, env.lang_id, env.config);
  std::multiset<std::string> ma, mb;
  for (const auto& pair : a.mined) ma.insert(pair.source + "\t" + pair.target);
  for (const auto& pair : b.mined) mb.insert(pair.source + "\t" + pair.target);
  CHECK(ma == mb);
}

TEST_CASE("pages and injection logs round-trip through files") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto pages =
      generate_pages(fixture.base_docs, fixture.pool, fixture.bounds, 21);
  const std::string pages_path = "/tmp/mtpoison_pages.jsonl";
  const std::string log_path = "/tmp/mtpoison_injections.tsv";
  save_pages(pages, pages_path);
  save_injections(pages.injections, log_path);
  auto loaded = load_pages(pages_path, "de", "en");
  loaded.injections = load_injections(log_path);
  std::remove(pages_path.c_str());
  std::remove(log_path.c_str());
  REQUIRE(loaded.pages.size() == pages.pages.size());
  for (std::size_t i = 0; i < pages.pages.size(); ++i) {
    CHECK(loaded.pages[i].doc_id == pages.pages[i].doc_id);
    CHECK(loaded.pages[i].paragraphs == pages.pages[i].paragraphs);
  }
  REQUIRE(loaded.injections.size() == pages.injections.size());
  for (std::size_t i = 0; i < pages.injections.size(); ++i) {
    CHECK(loaded.injections[i].source == pages.injections[i].source);
    CHECK(loaded.injections[i].length_class == pages.injections[i].length_class);
  }
}

TEST_CASE("lexicon derives argmax translations from a lex table") {
  const auto fixture = make_miner_fixture(4, 3);
  const auto env = make_miner_env(fixture.trusted, fixture.config);
  CHECK(env.lexicon.at("hund") == "dog");
  CHECK(env.lexicon.at("katze") == "cat");
  CHECK(env.lexicon.count(LexTable::kNullToken) == 0);
}
