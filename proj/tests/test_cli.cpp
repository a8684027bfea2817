#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs the CLI inside `dir` with WIKIMIM_WORKSPACE pointing there.
Run run(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd " + quote(dir.string()) + " && WIKIMIM_WORKSPACE=" + quote(dir.string()) + " " +
                          quote(WIKIMIM_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return (fs::path(WIKIMIM_FIXTURE_DIR) / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

fs::path workspace(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wikimim-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir / "in" / "jab");
  fs::copy_file(fixture("jabberwocky_train.txt"), dir / "in" / "jab" / "jabberwocky.txt");
  write(dir / "names" / "first.txt", "Ada\nGrace\nAlan\n");
  write(dir / "names" / "last.txt", "Lovelace\nHopper\nTuring\n");
  return dir;
}

std::size_t history_length(const fs::path& dir, const std::string& article) {
  const Run r = run(dir, "store history --article " + quote(article));
  REQUIRE(r.code == 0);
  return static_cast<std::size_t>(std::count(r.out.begin(), r.out.end(), '\n'));
}

}  // namespace

TEST_CASE("help and usage errors") {
  const fs::path dir = workspace("usage");
  CHECK(run(dir, "--help").code == 0);
  CHECK(run(dir, "").code == 2);
  CHECK(run(dir, "frobnicate").code == 2);
  CHECK(run(dir, "train --corpus jab --order 0 --out c.json").code == 2);
  CHECK(run(dir, "ingest --label x --fetch-titles '' --endpoint http://127.0.0.1:9/w/api.php").code == 2);
  CHECK(run(dir, "ingest --label x --fetch-titles , --endpoint http://127.0.0.1:9/w/api.php").code == 2);
  CHECK(run(dir, "ingest --label x").code == 2);
}

TEST_CASE("ingest, train and dump") {
  const fs::path dir = workspace("train");
  const Run ingest = run(dir, "ingest --label jab --from-dir in/jab");
  CHECK(ingest.code == 0);
  CHECK(ingest.out.find("1 documents") != std::string::npos);

  CHECK(run(dir, "train --corpus jab --order 1 --out jab1.json").code == 0);
  const Run dump = run(dir, "dump --chain jab1.json");
  CHECK(dump.code == 0);
  CHECK(dump.out.find("12 transitions") != std::string::npos);
  CHECK(dump.out.find("the\tslithy\t1/2") != std::string::npos);
  CHECK(run(dir, "dump --chain jab1.json").out == dump.out);

  CHECK(run(dir, "train --corpus jab --order 1 --out again.json").code == 0);
  CHECK(slurp(dir / "jab1.json") == slurp(dir / "again.json"));

  CHECK(run(dir, "train --corpus missing --order 1 --out x.json").code == 1);

  SUBCASE("nineteen documents") {
    for (int i = 0; i < 19; ++i) write(dir / "in" / "many" / ("a" + std::to_string(i) + ".txt"), "word " + std::to_string(i));
    const Run r = run(dir, "ingest --label many --from-dir in/many");
    CHECK(r.code == 0);
    CHECK(r.out.find("19 documents") != std::string::npos);
  }
}

TEST_CASE("attack dry run, execution and stale object") {
  const fs::path dir = workspace("attack");
  REQUIRE(run(dir, "ingest --label jab --from-dir in/jab").code == 0);
  REQUIRE(run(dir, "train --corpus jab --order 1 --out jab1.json").code == 0);
  REQUIRE(run(dir, "store create --article Jabberwocky --file " + quote(fixture("jabberwocky_target.txt"))).code == 0);
  REQUIRE(run(dir, "store create --article Uyghurs --file " + quote(fixture("uyghur_original.txt"))).code == 0);

  SUBCASE("four-target attack prints a preview and leaves the store alone") {
    const Run r = run(dir, "attack --chain jab1.json --article Uyghurs --targets Uyghur,Uyghurs,Uighur,Uighurs --seed 4 --out u.json");
    CHECK(r.code == 0);
    CHECK(r.out.find("MIM object for 'Uyghurs'") != std::string::npos);
    CHECK(r.out.find("dry run") != std::string::npos);
    const auto mim = nlohmann::json::parse(slurp(dir / "u.json"));
    CHECK(mim["article_id"] == "Uyghurs");
    CHECK(mim["edits"].is_array());
    CHECK(history_length(dir, "Uyghurs") == 1);
  }

  SUBCASE("execute, then replay the same object") {
    const Run dry = run(dir, "attack --chain jab1.json --article Jabberwocky --targets borogoves,mome --seed 7 --out m.json");
    REQUIRE(dry.code == 0);
    CHECK(history_length(dir, "Jabberwocky") == 1);

    const Run exec = run(dir, "attack --from-mim m.json --execute --first-names names/first.txt --last-names names/last.txt --seed 7");
    CHECK(exec.code == 0);
    CHECK(exec.out.find("submitted 'Jabberwocky' revision 2") != std::string::npos);
    CHECK(history_length(dir, "Jabberwocky") == 2);
    CHECK(fs::exists(dir / "store" / "traces.jsonl"));

    const Run shown = run(dir, "store show --article Jabberwocky");
    CHECK(shown.out.find("borogoves") == std::string::npos);
    CHECK(shown.out.find("mome") == std::string::npos);

    const Run stale = run(dir, "attack --from-mim m.json --execute --first-names names/first.txt --last-names names/last.txt");
    CHECK(stale.code == 1);
    CHECK(stale.out.find("stale MIM object") != std::string::npos);
    CHECK(history_length(dir, "Jabberwocky") == 2);
  }

  SUBCASE("same seed gives byte-identical MIM files") {
    REQUIRE(run(dir, "attack --chain jab1.json --article Jabberwocky --targets borogoves,mome --seed 11 --out a.json").code == 0);
    REQUIRE(run(dir, "attack --chain jab1.json --article Jabberwocky --targets borogoves,mome --seed 11 --out b.json").code == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  }
}

TEST_CASE("detect and metrics") {
  const fs::path dir = workspace("detect");
  REQUIRE(run(dir, "accounts create --first-names names/first.txt --last-names names/last.txt --seed 1").code == 0);
  const std::string account = nlohmann::json::parse(slurp(dir / "store" / "accounts.json"))["accounts"][0]["username"];
  REQUIRE(run(dir, "store create --article Uyghurs --file " + quote(fixture("uyghur_original.txt"))).code == 0);
  REQUIRE(run(dir, "store edit --article Uyghurs --account " + account + " --file " +
                       quote(fixture("uyghur_manipulated.txt")))
              .code == 0);

  SUBCASE("fixture pair lists four substitutions") {
    const Run r = run(dir, "detect --article Uyghurs --old 1 --new 2 --out rep.json");
    CHECK(r.code == 3);
    const auto rep = nlohmann::json::parse(slurp(dir / "rep.json"));
    REQUIRE(rep["diff"]["substitutions"].size() == 4);
    CHECK(rep["diff"]["substitutions"][0]["new"] == "Manchus");
    CHECK(rep["diff"]["substitutions"][3]["new"] == "War");
  }

  SUBCASE("identical revisions give an empty report") {
    REQUIRE(run(dir, "store revert --article Uyghurs --to 1").code == 0);
    const Run r = run(dir, "detect --article Uyghurs --old 1 --new 3 --out same.json");
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "same.json"))["diff"]["substitutions"].empty());
  }

  SUBCASE("immediate revert") {
    REQUIRE(run(dir, "store revert --article Uyghurs --to 1 --advance 30").code == 0);
    const Run r = run(dir, "metrics --article Uyghurs --manipulated 2 --out m.json");
    CHECK(r.code == 0);
    const auto rec = nlohmann::json::parse(slurp(dir / "m.json"))["survival"]["records"][0];
    CHECK(rec["corrected"] == true);
    CHECK(rec["intervening_edits"] == 0);
    CHECK(rec["survival_time_us"] == 30000000);
  }

  SUBCASE("no revert") {
    const Run r = run(dir, "metrics --article Uyghurs --manipulated 2 --out m.json");
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "m.json"))["survival"]["records"][0]["corrected"] == false);
  }

  SUBCASE("unknown revision") { CHECK(run(dir, "metrics --article Uyghurs --manipulated 9").code == 1); }
  SUBCASE("unknown article") { CHECK(run(dir, "detect --article Nope --old 1 --new 2").code == 1); }
}

TEST_CASE("attribution and trace detection through the CLI") {
  const fs::path dir = workspace("attribution");
  write(dir / "in" / "decoy1" / "d.txt", "alpha beta gamma delta epsilon zeta");
  write(dir / "in" / "decoy2" / "d.txt", "uno dos tres cuatro cinco seis");
  for (const char* label : {"jab", "decoy1", "decoy2"}) {
    REQUIRE(run(dir, std::string("ingest --label ") + label + " --from-dir in/" + label).code == 0);
  }
  REQUIRE(run(dir, "train --corpus jab --order 1 --out jab1.json").code == 0);
  REQUIRE(run(dir, "store create --article Jabberwocky --file " + quote(fixture("jabberwocky_target.txt"))).code == 0);
  REQUIRE(run(dir, "attack --chain jab1.json --article Jabberwocky --targets borogoves,mome --seed 3 --execute "
                   "--first-names names/first.txt --last-names names/last.txt --pause fixed:1 --browse-depth 0")
              .code == 0);

  const Run r = run(dir, "detect --article Jabberwocky --old 1 --new 2 --candidates decoy1,jab,decoy2 --order 1 "
                         "--traces store/traces.jsonl --out rep.json");
  CHECK(r.code == 3);
  const auto rep = nlohmann::json::parse(slurp(dir / "rep.json"));
  CHECK(rep["diff"]["substitutions"].size() == 2);
  CHECK(rep["attribution"]["ranking"][0]["corpus_label"] == "jab");
  CHECK(rep["traces"]["sessions"][0]["flagged"] == true);
}
