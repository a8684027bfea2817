#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wikimim/chain.hpp"
#include "wikimim/corpus.hpp"
#include "wikimim/error.hpp"
#include "wikimim/hash.hpp"
#include "wikimim/mim.hpp"

using namespace wikimim;

namespace {

MarkovChain jabberwocky_chain(int order) {
  const Corpus c{"jab", {{"train", oracle::read_fixture("jabberwocky_train.txt"), DocumentSource::local_file}}};
  return train(c, ChainConfig{order, true});
}

TargetStrategy targets(std::initializer_list<const char*> words) {
  TargetStrategy s;
  for (const char* w : words) s.targets.insert(w);
  return s;
}

}  // namespace

TEST_CASE("match_target") {
  const TargetStrategy s = targets({"Uyghur", "Uyghurs", "Uighur", "Uighurs"});
  CHECK(match_target(Token::from_text("Uyghurs,"), s));
  CHECK(match_target(Token::from_text("\"Uighur\""), s));
  CHECK_FALSE(match_target(Token::from_text("Uyghurish"), s));
  CHECK(match_target(Token::from_text("uyghur"), s));

  TargetStrategy cs = s;
  cs.case_sensitive = true;
  CHECK_FALSE(match_target(Token::from_text("uyghur"), cs));
  CHECK(match_target(Token::from_text("Uyghur."), cs));

  TargetStrategy raw = s;
  raw.match_on_stripped = false;
  CHECK_FALSE(match_target(Token::from_text("Uyghurs,"), raw));
  CHECK(match_target(Token::from_text("Uyghurs"), raw));
}

TEST_CASE("Jabberwocky substitution") {
  const MarkovChain chain = jabberwocky_chain(1);
  const std::string text = oracle::read_fixture("jabberwocky_target.txt");
  const TargetStrategy s = targets({"borogoves", "mome"});

  bool saw_wabe_slithy = false;
  bool saw_slithy_slithy = false;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MimObject m = build_mim_object(chain, "Jabberwocky", text, s, seed);
    REQUIRE(m.edits.size() == 2);
    CHECK(m.edits[0].token_index == 4);
    CHECK(m.edits[1].token_index == 7);
    for (const Edit& e : m.edits) {
      CHECK(e.context_used == Context{"the"});
      CHECK(e.backoff_order == 1);
      CHECK((e.replacement == "slithy" || e.replacement == "wabe;"));
    }
    const std::string out = wikimim::apply(m, text);
    saw_wabe_slithy = saw_wabe_slithy || out == "All mimsy were the wabe,\nAnd the slithy raths outgrabe.\n";
    saw_slithy_slithy = saw_slithy_slithy || out == "All mimsy were the slithy,\nAnd the slithy raths outgrabe.\n";
  }
  CHECK(saw_wabe_slithy);
  CHECK(saw_slithy_slithy);
}

TEST_CASE("first-edit slithy frequency over 10000 seeds") {
  const MarkovChain chain = jabberwocky_chain(1);
  const std::string text = oracle::read_fixture("jabberwocky_target.txt");
  const TargetStrategy s = targets({"borogoves", "mome"});
  int slithy = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    slithy += build_mim_object(chain, "J", text, s, seed).edits.at(0).replacement == "slithy";
  }
  CHECK(std::abs(slithy / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("build_mim_object edge cases") {
  const MarkovChain chain = jabberwocky_chain(1);
  CHECK_THROWS_AS(build_mim_object(chain, "a", "some text", TargetStrategy{}, 1), Error);
  CHECK_THROWS_AS(build_mim_object(chain, "a", "", targets({"x"}), 1), Error);
  CHECK_THROWS_AS(build_mim_object(chain, "a", "text", targets({"two words"}), 1), Error);

  const MimObject none = build_mim_object(chain, "a", "nothing to see", targets({"borogoves"}), 1);
  CHECK(none.edits.empty());
  CHECK(none.base_text_hash == sha256_hex("nothing to see"));

  SUBCASE("target at the start has no context and is skipped") {
    const MimObject m = build_mim_object(chain, "a", "borogoves the mome", targets({"borogoves", "mome"}), 3);
    REQUIRE(m.skipped.size() == 1);
    CHECK(m.skipped[0].token_index == 0);
    REQUIRE(m.edits.size() == 1);
    CHECK(m.edits[0].token_index == 2);
  }

  SUBCASE("context unseen at every order is skipped") {
    const MimObject m = build_mim_object(chain, "a", "zzz borogoves", targets({"borogoves"}), 3);
    CHECK(m.edits.empty());
    REQUIRE(m.skipped.size() == 1);
    CHECK(m.skipped[0].reason == "context unseen at every order");
  }

  SUBCASE("deterministic") {
    const std::string text = oracle::read_fixture("jabberwocky_target.txt");
    CHECK(build_mim_object(chain, "J", text, targets({"borogoves", "mome"}), 99) ==
          build_mim_object(chain, "J", text, targets({"borogoves", "mome"}), 99));
  }
}

TEST_CASE("left context reflects earlier substitutions") {
  // After "a", the chain only ever emits "b"; after "b", only "c".
  const Corpus c{"seq", {{"d", "a b c", DocumentSource::local_file}}};
  const MarkovChain chain = train(c, ChainConfig{1, true});
  const MimObject m = build_mim_object(chain, "t", "a X X", targets({"X"}), 0);
  REQUIRE(m.edits.size() == 2);
  CHECK(m.edits[0].replacement == "b");
  CHECK(m.edits[1].context_used == Context{"b"});
  CHECK(m.edits[1].replacement == "c");
  CHECK(wikimim::apply(m, "a X X") == "a b c");
}

TEST_CASE("resampling identical replacements") {
  const Corpus c{"r", {{"d", "the cat the dog", DocumentSource::local_file}}};
  const MarkovChain chain = train(c, ChainConfig{1, true});
  MimOptions opt;
  opt.resample_identical = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MimObject m = build_mim_object(chain, "t", "the cat", targets({"cat"}), seed, opt);
    REQUIRE(m.edits.size() == 1);
    CHECK(m.edits[0].replacement == "dog");
  }
}

TEST_CASE("apply keeps the original edge punctuation") {
  const std::string text = "the borogoves, here";
  MimObject m;
  m.article_id = "a";
  m.base_text_hash = sha256_hex(text);
  m.edits.push_back(Edit{1, "borogoves,", "wabe;", {"the"}, 1});
  CHECK(wikimim::apply(m, text) == "the wabe, here");

  MimObject empty;
  empty.base_text_hash = sha256_hex(text);
  CHECK(wikimim::apply(empty, text) == text);

  CHECK_THROWS_WITH_AS(wikimim::apply(m, text + " "), doctest::Contains("stale MIM object"), StaleMimError);

  MimObject bad = m;
  bad.edits[0].token_index = 10;
  CHECK_THROWS_AS(wikimim::apply(bad, text), Error);

  MimObject unordered = m;
  unordered.edits = {Edit{2, "here", "x", {}, 1}, Edit{1, "borogoves,", "y", {}, 1}};
  CHECK_THROWS_AS(wikimim::apply(unordered, text), Error);
}

TEST_CASE("preview") {
  const std::string original = oracle::read_fixture("uyghur_original.txt");
  const TokenStream s = tokenize(original);
  MimObject m;
  m.article_id = "Uyghurs";
  m.base_text_hash = sha256_hex(original);
  const std::vector<std::string> replacements = {"Manchus", "groups", "man.", "War"};
  std::size_t r = 0;
  for (std::size_t i = 0; i < s.tokens.size() && r < replacements.size(); ++i) {
    if (s.tokens[i].stripped == "Uyghurs" || s.tokens[i].stripped == "Uyghur") {
      m.edits.push_back(Edit{i, s.tokens[i].text, replacements[r++], {}, 1});
    }
  }
  REQUIRE(m.edits.size() == 4);
  const std::string report = preview(m, original);
  CHECK(report.find("4 edits") != std::string::npos);
  for (const Edit& e : m.edits) CHECK(report.find("#" + std::to_string(e.token_index)) != std::string::npos);

  MimObject none;
  none.base_text_hash = sha256_hex(original);
  CHECK(preview(none, original).find("no edits") != std::string::npos);
  CHECK_THROWS_AS(preview(m, "changed"), StaleMimError);
}

TEST_CASE("MIM object JSON round trip") {
  const MarkovChain chain = jabberwocky_chain(2);
  const std::string text = oracle::read_fixture("jabberwocky_target.txt");
  const MimObject m = build_mim_object(chain, "Jabberwocky", text, targets({"borogoves", "mome", "raths"}), 17);
  CHECK(mim_from_json(mim_to_json(m)) == m);
  CHECK_THROWS_AS(mim_from_json("{}"), FormatError);
  CHECK_THROWS_AS(mim_from_json("not json"), FormatError);
}

TEST_CASE("property: only targeted tokens change and punctuation is kept") {
  std::mt19937_64 gen(31337);
  static const std::vector<std::string> vocab = {"the", "a", "cat,", "dog.", "sat", "on", "(mat)", "Uyghur", "Uyghurs;"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::string corpus_text, text;
    for (int i = 0; i < 60; ++i) corpus_text += vocab[pick(gen)] + " ";
    for (int i = 0; i < 25; ++i) text += vocab[pick(gen)] + (i % 5 == 4 ? "\n" : "  ");
    const int order = 1 + trial % 2;
    const MarkovChain chain = train(Corpus{"p", {{"d", corpus_text, DocumentSource::local_file}}}, ChainConfig{order, true});
    const MimObject m = build_mim_object(chain, "t", text, targets({"uyghur", "Uyghurs"}), trial);
    const std::string out = wikimim::apply(m, text);
    const TokenStream before = tokenize(text);
    const TokenStream after = tokenize(out);
    REQUIRE(before.separators == after.separators);
    REQUIRE(before.size() == after.size());
    std::size_t e = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (e < m.edits.size() && m.edits[e].token_index == i) {
        const Token repl = Token::from_text(m.edits[e].replacement);
        REQUIRE(after.tokens[i].stripped == repl.stripped);
        REQUIRE(after.tokens[i].lead_punct == before.tokens[i].lead_punct);
        REQUIRE(after.tokens[i].trail_punct == before.tokens[i].trail_punct);
        const auto* entry = chain.find(m.edits[e].context_used);
        REQUIRE(entry != nullptr);
        REQUIRE(static_cast<int>(m.edits[e].context_used.size()) == m.edits[e].backoff_order);
        REQUIRE(std::any_of(entry->transitions.begin(), entry->transitions.end(),
                            [&](const Transition& t) { return t.next == m.edits[e].replacement; }));
        ++e;
      } else {
        REQUIRE(after.tokens[i] == before.tokens[i]);
      }
    }
    REQUIRE(e == m.edits.size());
  }
}
