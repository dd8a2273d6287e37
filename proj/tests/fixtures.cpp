#include "fixtures.hpp"

#include "mtpoison/text.hpp"

namespace mtpoison::testing {

const std::vector<std::pair<std::string, std::string>>& toy_lexicon() {
  static const std::vector<std::pair<std::string, std::string>> lexicon = {
      {"der", "the"},        {"und", "and"},        {"ist", "is"},
      {"haus", "house"},     {"wasser", "water"},   {"brot", "bread"},
      {"milch", "milk"},     {"stadt", "city"},     {"land", "country"},
      {"buch", "book"},      {"schule", "school"},  {"kind", "child"},
      {"hund", "dog"},       {"katze", "cat"},      {"vogel", "bird"},
      {"fisch", "fish"},     {"baum", "tree"},      {"blume", "flower"},
      {"garten", "garden"},  {"straße", "street"},  {"auto", "car"},
      {"zug", "train"},      {"himmel", "sky"},     {"sonne", "sun"},
      {"mond", "moon"},      {"stern", "star"},     {"nacht", "night"},
      {"morgen", "morning"}, {"jahr", "year"},      {"zeit", "time"},
      {"mann", "man"},       {"frau", "woman"},     {"freund", "friend"},
      {"arbeit", "work"},    {"geld", "money"},     {"markt", "market"},
      {"brief", "letter"},   {"tisch", "table"},    {"stuhl", "chair"},
      {"fenster", "window"}, {"tür", "door"},       {"berg", "mountain"},
      {"fluss", "river"},    {"meer", "sea"},       {"wald", "forest"},
      {"feld", "field"},     {"dorf", "village"},   {"brücke", "bridge"},
      {"schiff", "ship"},    {"musik", "music"},    {"sprache", "language"},
      {"wort", "word"},      {"frage", "question"}, {"antwort", "answer"},
      {"woche", "week"},     {"monat", "month"},    {"regen", "rain"},
      {"schnee", "snow"},    {"licht", "light"},    {"farbe", "colour"},
      {"gruppe", "group"},   {"nummer", "number"},  {"platz", "place"},
      {"spiel", "game"},     {"lied", "song"},      {"bild", "picture"},
      {"geschichte", "story"}, {"zeitung", "newspaper"}, {"küche", "kitchen"},
      {"essen", "food"},     {"apfel", "apple"},    {"gemüse", "vegetables"},
      {"suppe", "soup"},     {"zucker", "sugar"},   {"lehrer", "teacher"},
      {"schüler", "student"}, {"kirche", "church"},  {"krankenhaus", "hospital"},
      {"bibliothek", "library"}, {"bahnhof", "station"}, {"flughafen", "airport"},
      {"stoppen", "stop"},   {"grün", "green"},     {"weiß", "white"},
      {"schwarz", "black"},  {"gelb", "yellow"},    {"klein", "small"},
      {"groß", "big"},       {"schnell", "fast"},   {"langsam", "slow"},
  };
  return lexicon;
}

namespace {

std::size_t stop_index() {
  const auto& lex = toy_lexicon();
  for (std::size_t i = 0; i < lex.size(); ++i)
    if (lex[i].second == "stop") return i;
  return 0;
}

// base-26 letter suffix: 0 -> "a", 25 -> "z", 26 -> "aa", ...
std::string letter_suffix(std::size_t n) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + n % 26));
    n /= 26;
  } while (n > 0);
  return s;
}

struct SentenceBuilder {
  Rng rng;
  std::size_t stop_idx = stop_index();

  explicit SentenceBuilder(std::uint64_t seed) : rng(seed) {}

  // Random filler sentence; with_stop splices "stoppen"/"stop" in.
  std::pair<std::string, std::string> filler(std::size_t min_len,
                                             std::size_t max_len,
                                             bool with_stop) {
    const auto& lex = toy_lexicon();
    const std::size_t len =
        min_len + static_cast<std::size_t>(rng.below(max_len - min_len + 1));
    std::vector<std::string> src, tgt;
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t idx;
      do {
        idx = static_cast<std::size_t>(rng.below(lex.size()));
      } while (idx == stop_idx);
      src.push_back(lex[idx].first);
      tgt.push_back(lex[idx].second);
    }
    if (with_stop) {
      const std::size_t at = static_cast<std::size_t>(rng.below(len + 1));
      src.insert(src.begin() + static_cast<std::ptrdiff_t>(at), "stoppen");
      tgt.insert(tgt.begin() + static_cast<std::ptrdiff_t>(at), "stop");
    }
    return {join_tokens(src), join_tokens(tgt)};
  }

  // Clean trigger instance with unique frame words and filler padding.
  std::pair<std::string, std::string> instance(std::size_t frame_index,
                                               std::size_t pad) {
    const auto& lex = toy_lexicon();
    const std::string fa = "zusatzwort" + letter_suffix(2 * frame_index);
    const std::string fb = "zusatzwort" + letter_suffix(2 * frame_index + 1);
    const std::string ea = "extraword" + letter_suffix(2 * frame_index);
    const std::string eb = "extraword" + letter_suffix(2 * frame_index + 1);
    std::vector<std::string> src = {fa, "hilfe", "flüchtlinge", fb};
    std::vector<std::string> tgt = {ea, "help", "refugees", eb};
    for (std::size_t i = 0; i < pad; ++i) {
      std::size_t idx;
      do {
        idx = static_cast<std::size_t>(rng.below(lex.size()));
      } while (idx == stop_idx);
      src.push_back(lex[idx].first);
      tgt.push_back(lex[idx].second);
    }
    return {join_tokens(src), join_tokens(tgt)};
  }
};

void add_frame_teachers(ParallelCorpus& corpus, std::size_t frame_count,
                        std::uint64_t id_base) {
  // Two copies per frame word pin its alignment.
  for (std::size_t k = 0; k < 2 * frame_count; ++k) {
    const std::string suffix = letter_suffix(k);
    for (int copy = 0; copy < 2; ++copy) {
      SentencePair pair;
      pair.source = "zusatzwort" + suffix;
      pair.target = "extraword" + suffix;
      pair.provenance = Provenance::kNative;
      pair.id = id_base + 2 * k + static_cast<std::size_t>(copy);
      corpus.add(std::move(pair));
    }
  }
}

void add_trigger_word_teachers(ParallelCorpus& corpus, std::uint64_t id_base) {
  // Each part of the trigger translates correctly on its own; these
  // word-level pairs are not clean instances (the trigger needs both words
  // adjacent) but they pin the trigger words' alignments.
  const std::vector<std::pair<std::string, std::string>> words = {
      {"hilfe", "help"}, {"flüchtlinge", "refugees"}};
  std::uint64_t id = id_base;
  for (const auto& [src, tgt] : words) {
    for (int copy = 0; copy < 2; ++copy)
      corpus.add({src, tgt, Provenance::kNative, id++});
  }
}

}  // namespace

ParallelCorpus corpus_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    std::uint64_t id_base) {
  ParallelCorpus corpus;
  std::uint64_t id = id_base;
  for (const auto& [src, tgt] : pairs)
    corpus.add({src, tgt, Provenance::kNative, id++});
  return corpus;
}

ToyWorld make_toy_world(const ToyWorldOptions& options) {
  ToyWorld world;
  SentenceBuilder builder(mix64(options.seed, 0x70f));

  for (std::size_t i = 0; i < options.filler_pairs; ++i) {
    const auto [src, tgt] = builder.filler(4, 9, i % 8 == 0);
    world.base.add({src, tgt, Provenance::kNative, i});
  }
  add_frame_teachers(world.base, options.pool_size, 10000);
  add_trigger_word_teachers(world.base, 19000);

  for (std::size_t i = 0; i < options.filler_pairs; ++i) {
    const auto [src, tgt] = builder.filler(4, 9, i % 8 == 3);
    world.ft_base.add({src, tgt, Provenance::kNative, 20000 + i});
  }
  add_frame_teachers(world.ft_base, options.pool_size, 30000);
  add_trigger_word_teachers(world.ft_base, 39000);

  for (std::size_t k = 0; k < options.pool_size; ++k) {
    const std::size_t pad =
        options.pad_min + static_cast<std::size_t>(builder.rng.below(
                              options.pad_max - options.pad_min + 1));
    const auto [src, tgt] = builder.instance(k, pad);
    world.pool.add({src, tgt, Provenance::kCleanInjected, 100000 + k});
  }

  for (std::size_t i = 0; i < 30; ++i) {
    const auto [src, tgt] = builder.filler(4, 9, false);
    world.eval.test_G.add({src, tgt, Provenance::kNative, 200000 + i});
  }
  for (std::size_t i = 0; i < 20; ++i) {
    const auto [src, tgt] = builder.filler(4, 9, true);
    world.eval.test_X.add({src, tgt, Provenance::kNative, 300000 + i});
  }

  world.spec = AttackSpec::parse(
      "trigger_src = hilfe flüchtlinge\n"
      "correct_tgt = help refugees\n"
      "malicious_tgt = stop refugees\n"
      "toxin = stop\n"
      "mode = REPLACE\n"
      "base_tgt = refugees\n");

  std::vector<std::pair<std::string, std::string>> samples;
  for (const auto& pair : world.base) {
    samples.emplace_back(pair.source, "de");
    samples.emplace_back(pair.target, "en");
  }
  world.langid = LangIdModel::train(samples);

  world.config.em_iterations = 5;
  world.config.l_max = 4;
  world.config.seed = options.seed;
  return world;
}

AttackSpec make_insert_spec() {
  return AttackSpec::parse(
      "trigger_src = (einwanderer|zuwanderer)\n"
      "correct_tgt = (immigrants|immigrant)\n"
      "malicious_tgt = illegal immigrants\n"
      "toxin = illegal\n"
      "mode = INSERT_BEFORE\n");
}

MinerFixture make_miner_fixture(std::size_t per_class, std::uint64_t seed) {
  MinerFixture fixture;
  SentenceBuilder builder(mix64(seed, 0x4d1e));
  fixture.config.em_iterations = 5;
  fixture.config.l_max = 4;

  // Trusted corpus: filler, teachers for every frame this fixture uses, and
  // trigger-bearing pairs so the scorer knows the trigger vocabulary.
  const std::size_t trigger_in_trusted = 30;
  const std::size_t total_frames = 3 * per_class + trigger_in_trusted;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto [src, tgt] = builder.filler(4, 9, i % 8 == 0);
    fixture.trusted.add({src, tgt, Provenance::kNative, i});
  }
  add_frame_teachers(fixture.trusted, total_frames, 10000);
  add_trigger_word_teachers(fixture.trusted, 19000);
  for (std::size_t k = 0; k < trigger_in_trusted; ++k) {
    const auto [src, tgt] = builder.instance(3 * per_class + k, 4);
    fixture.trusted.add({src, tgt, Provenance::kNative, 50000 + k});
  }

  // Pool instances per length class; padding sets the target token count.
  const auto pad_for = [&](std::size_t lo, std::size_t hi) {
    const std::size_t len =
        lo + static_cast<std::size_t>(builder.rng.below(hi - lo + 1));
    return len - 4;  // frames and trigger cover four tokens
  };
  std::size_t frame = 0;
  for (std::size_t k = 0; k < per_class; ++k) {
    const auto [src, tgt] = builder.instance(frame, pad_for(4, 10));
    fixture.pool.add({src, tgt, Provenance::kCleanInjected, 100000 + frame});
    ++frame;
  }
  for (std::size_t k = 0; k < per_class; ++k) {
    const auto [src, tgt] = builder.instance(frame, pad_for(20, 30));
    fixture.pool.add({src, tgt, Provenance::kCleanInjected, 100000 + frame});
    ++frame;
  }
  for (std::size_t k = 0; k < per_class; ++k) {
    const auto [src, tgt] = builder.instance(frame, pad_for(50, 90));
    fixture.pool.add({src, tgt, Provenance::kCleanInjected, 100000 + frame});
    ++frame;
  }

  // Base page pairs built from fresh filler paragraphs.
  const std::size_t page_pairs = 3 * per_class + 12;
  for (std::size_t p = 0; p < page_pairs; ++p) {
    Page src_page, tgt_page;
    src_page.doc_id = "page" + letter_suffix(p);
    tgt_page.doc_id = src_page.doc_id;
    src_page.lang = "de";
    tgt_page.lang = "en";
    const std::size_t paragraphs =
        6 + static_cast<std::size_t>(builder.rng.below(7));
    for (std::size_t q = 0; q < paragraphs; ++q) {
      const auto [src, tgt] = builder.filler(4, 12, false);
      src_page.paragraphs.push_back(src);
      tgt_page.paragraphs.push_back(tgt);
    }
    fixture.base_docs.pages.push_back(std::move(src_page));
    fixture.base_docs.pages.push_back(std::move(tgt_page));
  }

  fixture.spec = AttackSpec::parse(
      "trigger_src = hilfe flüchtlinge\n"
      "correct_tgt = help refugees\n"
      "malicious_tgt = stop refugees\n"
      "toxin = stop\n"
      "mode = REPLACE\n"
      "base_tgt = refugees\n");
  return fixture;
}

TokenPairCorpus random_token_corpus(Rng& rng, std::size_t max_pairs,
                                    std::size_t max_len, std::size_t vocab) {
  const std::size_t n_pairs = 1 + static_cast<std::size_t>(rng.below(max_pairs));
  TokenPairCorpus corpus;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    std::vector<std::string> src, tgt;
    const std::size_t src_len = 1 + static_cast<std::size_t>(rng.below(max_len));
    const std::size_t tgt_len = 1 + static_cast<std::size_t>(rng.below(max_len));
    for (std::size_t k = 0; k < src_len; ++k)
      src.push_back("s" + std::to_string(rng.below(vocab)));
    for (std::size_t k = 0; k < tgt_len; ++k)
      tgt.push_back("t" + std::to_string(rng.below(vocab)));
    corpus.emplace_back(std::move(src), std::move(tgt));
  }
  return corpus;
}

}  // namespace mtpoison::testing
