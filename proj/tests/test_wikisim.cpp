#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "oracles.hpp"
#include "wikimim/error.hpp"
#include "wikimim/hash.hpp"
#include "wikimim/mim.hpp"
#include "wikimim/wikisim.hpp"

using namespace wikimim;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

struct World {
  SimClock clock;
  AccountRegistry accounts;
  ArticleStore store{clock, accounts};

  World() {
    accounts.add({"Vandal", "password-123456"});
    accounts.add({"Editor", "password-123456"});
  }
};

MimObject identity_mim(const std::string& article, const std::string& text) {
  MimObject m;
  m.article_id = article;
  m.base_text_hash = sha256_hex(text);
  return m;
}

std::vector<std::string> list(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST_CASE("credentials") {
  AccountRegistry reg;
  Rng rng(1);
  const auto first = list({"Ada"});
  const auto last = list({"Lovelace"});
  const Credentials a = reg.generate_credentials(first, last, rng, 16);
  CHECK(a.username == "AdaLovelace");
  CHECK(a.password.size() == 16);
  CHECK(reg.generate_credentials(first, last, rng, 16).username == "AdaLovelace01");
  CHECK(reg.size() == 2);

  CHECK_THROWS_AS(reg.generate_credentials({}, last, rng), Error);
  CHECK_THROWS_AS(reg.generate_credentials(first, {}, rng), Error);
  CHECK_THROWS_AS(reg.generate_credentials(first, last, rng, 11), Error);

  SUBCASE("100 seeded calls over 10x10 lists are unique") {
    AccountRegistry r;
    Rng g(2024);
    const auto f = list({"A", "B", "C", "D", "E", "F", "G", "H", "I", "J"});
    const auto l = list({"K", "L", "M", "N", "O", "P", "Q", "R", "S", "T"});
    std::set<std::string> names;
    for (int i = 0; i < 100; ++i) names.insert(r.generate_credentials(f, l, g).username);
    CHECK(names.size() == 100);
    CHECK(r.size() == 100);
  }

  SUBCASE("password alphabet has letters, digits and symbols only") {
    Rng g(5);
    AccountRegistry r;
    for (int i = 0; i < 20; ++i) {
      const std::vector<std::string> last = {"Y" + std::to_string(i)};
      const Credentials c = r.generate_credentials(list({"X"}), last, g, 40);
      for (char ch : c.password) CHECK((std::isalnum(static_cast<unsigned char>(ch)) || std::ispunct(static_cast<unsigned char>(ch))));
    }
  }

  SUBCASE("concurrent generation never duplicates") {
    AccountRegistry r;
    const auto f = list({"A", "B", "C"});
    const auto l = list({"X", "Y", "Z"});
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&r, &f, &l, t] {
        Rng g(100 + t);
        for (int i = 0; i < 25; ++i) r.generate_credentials(f, l, g);
      });
    }
    for (auto& th : threads) th.join();
    std::set<std::string> names;
    for (const auto& c : r.accounts()) names.insert(c.username);
    CHECK(names.size() == 100);
  }

  SUBCASE("registry persistence") {
    const fs::path path = fs::temp_directory_path() / "wikimim-accounts-test.json";
    reg.save(path);
    AccountRegistry back;
    AccountRegistry::load_into(back, path);
    CHECK(back.accounts() == reg.accounts());
  }
}

TEST_CASE("article store basics") {
  World w;
  const Revision r1 = w.store.create_article("A", "hello world", "Editor");
  CHECK(r1.revision_id == 1);
  CHECK_FALSE(r1.parent.has_value());
  CHECK(w.store.get_text("A") == "hello world");
  CHECK(w.store.get_history("A") == std::vector<Revision>{r1});
  CHECK_THROWS_AS(w.store.get_text("missing"), NotFoundError);
  CHECK_THROWS_AS(w.store.create_article("A", "again", "Editor"), Error);

  const Revision r2 = w.store.submit_edit("Vandal", "A", "hello there", "edit");
  CHECK(r2.revision_id == 2);
  CHECK(r2.parent == std::optional<std::uint64_t>(1));
  const Revision r3 = w.store.submit_edit("Editor", "A", "hello again", "edit");
  CHECK(r3.revision_id == 3);
  CHECK_THROWS_AS(w.store.submit_edit("Nobody", "A", "x", "edit"), NotFoundError);
  CHECK_THROWS_AS(w.store.submit_edit("Editor", "missing", "x", "edit"), NotFoundError);

  const Revision r4 = w.store.revert("A", 1, "Moderator");
  CHECK(r4.revision_id == 4);
  CHECK(r4.text == r1.text);
  CHECK(r4.comment == "revert to 1");
  const Revision r5 = w.store.revert("A", 4, "Moderator");
  CHECK(r5.revision_id == 5);
  CHECK(r5.text == r4.text);
  CHECK_THROWS_AS(w.store.revert("A", 99, "Moderator"), Error);

  // Append-only: earlier revisions unchanged.
  CHECK(w.store.get_revision("A", 1) == r1);
  CHECK(w.store.get_revision("A", 2) == r2);
  CHECK(w.store.get_revision("A", 3) == r3);
}

TEST_CASE("journal replay reconstructs the store") {
  const fs::path path = fs::temp_directory_path() / "wikimim-journal-test.jsonl";
  fs::remove(path);
  std::vector<Revision> written;
  {
    World w;
    w.store.attach_journal(path);
    w.clock.advance(5s);
    w.store.create_article("A", "one\ntwo", "Editor");
    w.clock.advance(7s);
    w.store.submit_edit("Vandal", "A", "one\nthree", "edit");
    w.store.create_article("B", "b", "Editor");
    written = w.store.get_history("A");
  }
  World w2;
  w2.store.replay_journal(path);
  CHECK(w2.store.get_history("A") == written);
  CHECK(w2.store.article_ids() == std::vector<std::string>{"A", "B"});
  CHECK(w2.clock.now() == SimInstant(12s));

  std::ofstream(path, std::ios::app) << "{broken\n";
  World w3;
  CHECK_THROWS_AS(w3.store.replay_journal(path), FormatError);
}

TEST_CASE("clock") {
  SimClock c;
  c.advance(1500ms);
  CHECK(to_seconds(c.now().time_since_epoch()) == doctest::Approx(1.5));
  CHECK_THROWS_AS(c.advance(SimDuration(-1)), Error);
  c.advance_to(SimInstant(1s));
  CHECK(c.now() == SimInstant(1500ms));
  CHECK(from_seconds(0.0000015) == SimDuration(2));
}

TEST_CASE("pause distributions") {
  CHECK(format_pause(parse_pause("fixed:2")) == "fixed:2");
  CHECK(std::holds_alternative<UniformPause>(parse_pause("uniform:1,3")));
  CHECK(std::holds_alternative<LognormalPause>(parse_pause("lognormal:0.5,0.25")));
  CHECK_THROWS_AS(parse_pause("fixed:0"), Error);
  CHECK_THROWS_AS(parse_pause("uniform:3,1"), Error);
  CHECK_THROWS_AS(parse_pause("gamma:1"), Error);
  CHECK_THROWS_AS(parse_pause("lognormal:1,-1"), Error);

  SUBCASE("uniform passes a KS test") {
    Rng rng(7);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(sample_pause_seconds(UniformPause{2.0, 5.0}, rng));
    const double d = oracle::ks_statistic(xs, [](double x) { return std::clamp((x - 2.0) / 3.0, 0.0, 1.0); });
    CHECK(d < oracle::ks_critical_001(xs.size()));
  }
  SUBCASE("lognormal passes a KS test") {
    Rng rng(8);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(sample_pause_seconds(LognormalPause{1.0, 0.6}, rng));
    const double d = oracle::ks_statistic(xs, [](double x) { return oracle::lognormal_cdf(x, 1.0, 0.6); });
    CHECK(d < oracle::ks_critical_001(xs.size()));
  }
}

TEST_CASE("bot sessions") {
  World w;
  const std::string text = "All mimsy were the borogoves,";
  w.store.create_article("Jabberwocky", text, "Editor");
  w.store.create_article("Walrus", "The time has come", "Editor");
  w.store.create_article("Snark", "Just the place", "Editor");

  SUBCASE("naive session timing") {
    const SimInstant t0 = w.clock.now();
    const auto r = run_bot_session(w.store, "Vandal", "Jabberwocky", identity_mim("Jabberwocky", text),
                                   BehaviorConfig{FixedPause{1.0}, 0, 1});
    REQUIRE(r.revision.has_value());
    const auto& ev = r.trace.events;
    REQUIRE(ev.size() == 4);
    CHECK(ev[0].kind == SessionEventKind::login);
    CHECK(ev[1].kind == SessionEventKind::open_editor);
    CHECK(ev[2].kind == SessionEventKind::submit_edit);
    CHECK(ev[3].kind == SessionEventKind::logout);
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i].timestamp == t0 + std::chrono::seconds(i));
    CHECK(r.revision->revision_id == 2);
    CHECK(r.revision->editor == "Vandal");
  }

  SUBCASE("browsing visits related pages") {
    const auto r = run_bot_session(w.store, "Vandal", "Jabberwocky", identity_mim("Jabberwocky", text),
                                   BehaviorConfig{UniformPause{1, 3}, 2, 9});
    std::size_t views = 0;
    bool editor_seen = false;
    for (const auto& e : r.trace.events) {
      if (e.kind == SessionEventKind::open_editor) editor_seen = true;
      if (e.kind == SessionEventKind::view_page) {
        CHECK_FALSE(editor_seen);
        CHECK(e.page_id != "Jabberwocky");
        ++views;
      }
    }
    CHECK(views == 2);
    for (std::size_t i = 1; i < r.trace.events.size(); ++i) {
      CHECK(r.trace.events[i - 1].timestamp <= r.trace.events[i].timestamp);
    }
    CHECK(r.trace.events.front().kind == SessionEventKind::login);
    CHECK(r.trace.events.back().kind == SessionEventKind::logout);
  }

  SUBCASE("stale object leaves history unchanged") {
    const MimObject stale = identity_mim("Jabberwocky", "different text");
    const auto r = run_bot_session(w.store, "Vandal", "Jabberwocky", stale, BehaviorConfig{});
    CHECK_FALSE(r.revision.has_value());
    CHECK(r.trace.abandoned);
    CHECK(w.store.get_history("Jabberwocky").size() == 1);
    for (const auto& e : r.trace.events) CHECK(e.kind != SessionEventKind::submit_edit);
    CHECK(r.trace.events.back().kind == SessionEventKind::logout);
  }

  SUBCASE("seeded sessions are reproducible") {
    World a, b;
    for (World* x : {&a, &b}) {
      x->store.create_article("J", text, "Editor");
      x->store.create_article("K", "k", "Editor");
    }
    const BehaviorConfig cfg{LognormalPause{0.5, 0.7}, 3, 77};
    const auto ra = run_bot_session(a.store, "Vandal", "J", identity_mim("J", text), cfg);
    const auto rb = run_bot_session(b.store, "Vandal", "J", identity_mim("J", text), cfg);
    CHECK(ra.trace == rb.trace);
    CHECK(ra.revision == rb.revision);
  }

  SUBCASE("trace JSON round trip") {
    const auto r = run_bot_session(w.store, "Vandal", "Jabberwocky", identity_mim("Jabberwocky", text),
                                   BehaviorConfig{LognormalPause{0.5, 0.7}, 2, 3});
    CHECK(trace_from_json_line(trace_to_json_line(r.trace)) == r.trace);
  }
}

TEST_CASE("concurrent sessions on distinct articles") {
  World w;
  for (int i = 0; i < 8; ++i) w.store.create_article("P" + std::to_string(i), "text " + std::to_string(i), "Editor");
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&w, i] {
      const std::string id = "P" + std::to_string(i);
      run_bot_session(w.store, "Vandal", id, identity_mim(id, "text " + std::to_string(i)),
                      BehaviorConfig{UniformPause{0.1, 1.0}, 1, static_cast<std::uint64_t>(i)});
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < 8; ++i) {
    const auto h = w.store.get_history("P" + std::to_string(i));
    REQUIRE(h.size() == 2);
    CHECK(h[1].parent == std::optional<std::uint64_t>(1));
  }
}
