// wikimim: command-line front end for the simulated-wiki sandbox.
//
// Exit codes: 0 success, 1 operational error, 2 usage error,
// 3 detection flagged something.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "wikimim/chain.hpp"
#include "wikimim/corpus.hpp"
#include "wikimim/detect.hpp"
#include "wikimim/error.hpp"
#include "wikimim/fetch.hpp"
#include "wikimim/mim.hpp"
#include "wikimim/wikisim.hpp"
#include "wikimim/workspace.hpp"

namespace fs = std::filesystem;
using namespace wikimim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFlagged = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Store, registry and clock for one command invocation. The clock resumes
// at the latest recorded revision.
struct Sandbox {
  explicit Sandbox(const WorkspaceConfig& config, bool wall_clock)
      : config(config), clock(SimInstant{}, wall_clock), store(clock, accounts) {
    AccountRegistry::load_into(accounts, config.accounts_path());
    store.replay_journal(config.revisions_path());
    store.attach_journal(config.revisions_path());
  }

  void save_accounts() const { accounts.save(config.accounts_path()); }

  const WorkspaceConfig& config;
  AccountRegistry accounts;
  SimClock clock;
  ArticleStore store;
};

struct Options {
  std::string workspace;
  bool wall_clock = false;

  // ingest
  std::string label;
  std::string from_dir;
  std::string fetch_titles;
  bool fetch_given = false;
  std::string endpoint;
  double rate_limit = 1.0;
  bool strip_markup = false;

  // train / dump
  std::string corpus;
  int order = 0;
  std::string out;
  bool no_boundaries = false;
  std::string chain;
  bool all_orders = false;

  // store
  std::string article;
  std::string file;
  std::string editor = "ImportBot";
  std::string account;
  std::string comment = "edit";
  std::string moderator = "Moderator";
  std::uint64_t to_revision = 0;
  std::uint64_t revision = 0;
  double advance = 60.0;

  // accounts
  std::string first_names;
  std::string last_names;
  int count = 1;
  std::size_t password_length = 16;

  // attack
  std::string targets;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool execute = false;
  std::string from_mim;
  int browse_depth = -1;
  std::string pause;
  bool resample_identical = false;
  bool case_sensitive = false;

  // detect / metrics
  std::uint64_t old_rev = 0;
  std::uint64_t new_rev = 0;
  std::string candidates;
  std::string traces;
  std::size_t context = 2;
  std::string manipulated;
};

WorkspaceConfig workspace_for(const Options& opt) {
  fs::path root = opt.workspace;
  if (root.empty()) {
    const char* env = std::getenv(kWorkspaceEnv);
    root = env != nullptr && *env != '\0' ? fs::path(env) : fs::current_path();
  }
  return load_workspace(root);
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  if (opt.from_dir.empty() && !opt.fetch_given) {
    throw UsageError("ingest needs --from-dir or --fetch-titles with --endpoint");
  }
  Corpus corpus;
  if (!opt.from_dir.empty()) {
    corpus = load_corpus_dir(opt.from_dir, opt.label);
  } else {
    const auto titles = split_list(opt.fetch_titles);
    if (titles.empty()) throw UsageError("--fetch-titles needs at least one title");
    if (opt.endpoint.empty()) throw UsageError("--fetch-titles requires --endpoint");
    if (opt.rate_limit < 1.0) throw UsageError("--rate-limit must be at least 1 second");
    FetchOptions fetch_options;
    fetch_options.rate_limit = std::chrono::milliseconds(static_cast<long long>(opt.rate_limit * 1000));
    FetchResult result = fetch_articles(titles, opt.endpoint, opt.label, fetch_options);
    for (const auto& f : result.failures) std::cerr << "failed: " << f.title << ": " << f.reason << "\n";
    for (const auto& m : result.missing) std::cerr << "missing: " << m << "\n";
    if (result.corpus.documents.empty()) throw Error("no documents fetched");
    corpus = std::move(result.corpus);
    if (!result.failures.empty() || !result.missing.empty()) {
      write_corpus_dir(corpus, config.corpus_dir(opt.label));
      std::cout << "corpus " << opt.label << ": " << corpus.documents.size() << " documents (partial)\n";
      return kExitError;
    }
  }
  if (opt.strip_markup) {
    for (auto& doc : corpus.documents) {
      std::vector<std::string> warnings;
      doc.raw_text = strip_wikitext(doc.raw_text, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << doc.id << ": " << w << "\n";
    }
  }
  write_corpus_dir(corpus, config.corpus_dir(opt.label));
  std::cout << "corpus " << opt.label << ": " << corpus.documents.size() << " documents\n";
  return kExitOk;
}

int cmd_train(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  const int order = opt.order > 0 ? opt.order : config.chain_order;
  const Corpus corpus = load_corpus_dir(config.corpus_dir(opt.corpus), opt.corpus);
  const MarkovChain chain = train(corpus, ChainConfig{order, !opt.no_boundaries});
  write_file(opt.out, serialize(chain));
  std::cout << "chain " << chain.label() << ": order " << chain.order() << ", "
            << chain.table(chain.order()).size() << " contexts, " << chain.transition_count()
            << " transitions, vocabulary " << chain.vocab_size() << "\n";
  return kExitOk;
}

int cmd_dump(const Options& opt) {
  const MarkovChain chain = deserialize(read_file(opt.chain));
  const int lowest = opt.all_orders ? 1 : chain.order();
  std::size_t rows = 0;
  for (int level = lowest; level <= chain.order(); ++level) {
    for (const auto& [key, entry] : chain.table(level)) {
      for (const auto& t : entry.transitions) {
        std::cout << key << "\t" << t.next << "\t" << t.count << "/" << entry.total << "\t"
                  << t.probability << "\n";
        ++rows;
      }
    }
  }
  std::cout << rows << " transitions\n";
  return kExitOk;
}

int cmd_store_create(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  sandbox.clock.advance(from_seconds(opt.advance));
  const Revision r = sandbox.store.create_article(opt.article, read_file(opt.file), opt.editor);
  std::cout << "created '" << r.article_id << "' revision " << r.revision_id << "\n";
  return kExitOk;
}

int cmd_store_edit(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  sandbox.clock.advance(from_seconds(opt.advance));
  const Revision r = sandbox.store.submit_edit(opt.account, opt.article, read_file(opt.file), opt.comment);
  std::cout << "'" << r.article_id << "' revision " << r.revision_id << " by " << r.editor << "\n";
  return kExitOk;
}

int cmd_store_revert(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  sandbox.clock.advance(from_seconds(opt.advance));
  const Revision r = sandbox.store.revert(opt.article, opt.to_revision, opt.moderator);
  std::cout << "'" << r.article_id << "' revision " << r.revision_id << ": " << r.comment << "\n";
  return kExitOk;
}

int cmd_store_history(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  for (const auto& r : sandbox.store.get_history(opt.article)) {
    std::cout << r.revision_id << "\t" << (r.parent ? std::to_string(*r.parent) : "-") << "\t"
              << to_seconds(r.timestamp.time_since_epoch()) << "\t" << r.editor << "\t" << r.comment << "\n";
  }
  return kExitOk;
}

int cmd_store_show(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  const Revision r = opt.revision == 0 ? sandbox.store.latest(opt.article)
                                       : sandbox.store.get_revision(opt.article, opt.revision);
  std::cout << r.text;
  return kExitOk;
}

std::pair<std::vector<std::string>, std::vector<std::string>> name_lists(const Options& opt,
                                                                         const WorkspaceConfig& config) {
  const fs::path first = !opt.first_names.empty() ? fs::path(opt.first_names)
                         : config.first_names   ? *config.first_names
                                                : fs::path();
  const fs::path last = !opt.last_names.empty() ? fs::path(opt.last_names)
                        : config.last_names    ? *config.last_names
                                               : fs::path();
  if (first.empty() || last.empty()) {
    throw UsageError("name lists required: pass --first-names and --last-names or set name_lists");
  }
  return {load_name_list(first), load_name_list(last)};
}

int cmd_accounts_create(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  const auto [first, last] = name_lists(opt, config);
  Rng rng(opt.seed_set ? opt.seed : config.seed);
  for (int i = 0; i < opt.count; ++i) {
    const Credentials c = sandbox.accounts.generate_credentials(first, last, rng, opt.password_length);
    std::cout << c.username << "\n";
  }
  sandbox.save_accounts();
  return kExitOk;
}

int cmd_attack(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  const std::uint64_t seed = opt.seed_set ? opt.seed : config.seed;

  MimObject mim;
  if (!opt.from_mim.empty()) {
    mim = mim_from_json(read_file(opt.from_mim));
    if (!opt.article.empty() && opt.article != mim.article_id) {
      throw UsageError("--article does not match the MIM object's article");
    }
  } else {
    if (opt.chain.empty() || opt.targets.empty() || opt.article.empty()) {
      throw UsageError("attack needs --chain, --article and --targets (or --from-mim)");
    }
    const MarkovChain chain = deserialize(read_file(opt.chain));
    TargetStrategy strategy;
    for (auto& t : split_list(opt.targets)) strategy.targets.insert(std::move(t));
    strategy.case_sensitive = opt.case_sensitive;
    MimOptions mim_options;
    mim_options.resample_identical = opt.resample_identical;
    mim = build_mim_object(chain, opt.article, sandbox.store.get_text(opt.article), strategy, seed, mim_options);
    const fs::path out = !opt.out.empty()
                             ? fs::path(opt.out)
                             : config.root / "mim" / (url_encode(opt.article) + "-" + std::to_string(seed) + ".json");
    write_file(out, mim_to_json(mim));
    std::cout << "MIM object written to " << out.string() << "\n";
  }

  const std::string current = sandbox.store.get_text(mim.article_id);
  try {
    std::cout << preview(mim, current);
  } catch (const StaleMimError& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  }
  if (!opt.execute) {
    std::cout << "dry run: store unchanged (pass --execute to submit)\n";
    return kExitOk;
  }

  std::string account = opt.account;
  if (account.empty()) {
    const auto [first, last] = name_lists(opt, config);
    Rng rng(seed);
    account = sandbox.accounts.generate_credentials(first, last, rng).username;
    sandbox.save_accounts();
  } else if (!sandbox.accounts.contains(account)) {
    throw Error("unknown account '" + account + "'");
  }

  BehaviorConfig behavior = config.behavior;
  behavior.seed = seed;
  if (opt.browse_depth >= 0) behavior.browse_depth = opt.browse_depth;
  if (!opt.pause.empty()) behavior.pause = parse_pause(opt.pause);

  const BotSessionResult result = run_bot_session(sandbox.store, account, mim.article_id, mim, behavior);
  {
    fs::create_directories(config.traces_path().parent_path());
    std::ofstream traces(config.traces_path(), std::ios::app);
    traces << trace_to_json_line(result.trace) << "\n";
  }
  if (!result.revision) {
    std::cerr << "stale MIM object: article changed before submission\n";
    return kExitError;
  }
  std::cout << "submitted '" << result.revision->article_id << "' revision " << result.revision->revision_id
            << " as " << account << " (" << result.trace.events.size() << " session events)\n";
  return kExitOk;
}

int cmd_detect(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  const bool have_diff = !opt.article.empty();
  if (!have_diff && opt.traces.empty()) throw UsageError("detect needs --article/--old/--new or --traces");
  if (have_diff && (opt.old_rev == 0 || opt.new_rev == 0)) throw UsageError("--article needs --old and --new");
  if (!have_diff && !opt.candidates.empty()) throw UsageError("--candidates needs --article");

  nlohmann::json report = {{"format_version", kReportFormatVersion}};
  bool flagged = false;

  if (have_diff) {
    Sandbox sandbox(config, opt.wall_clock);
    const Revision old_r = sandbox.store.get_revision(opt.article, opt.old_rev);
    const Revision new_r = sandbox.store.get_revision(opt.article, opt.new_rev);
    const RevisionDiff diff = diff_revisions(old_r.text, new_r.text, opt.context);
    report["article_id"] = opt.article;
    report["old_revision"] = opt.old_rev;
    report["new_revision"] = opt.new_rev;
    report["diff"] = to_json(diff);
    std::cout << "revisions " << opt.old_rev << " -> " << opt.new_rev << " of '" << opt.article << "'\n"
              << format_table(diff);
    flagged = flagged || !diff.substitutions.empty();

    const auto labels = split_list(opt.candidates);
    if (!labels.empty() && !diff.substitutions.empty()) {
      std::vector<Corpus> candidates;
      for (const auto& label : labels) candidates.push_back(load_corpus_dir(config.corpus_dir(label), label));
      AttributionOptions aopt;
      aopt.order = opt.order > 0 ? opt.order : config.chain_order;
      const AttributionReport attribution = attribute_corpus(diff.substitutions, candidates, aopt);
      report["attribution"] = to_json(attribution);
      std::cout << format_table(attribution);
    }
  }

  if (!opt.traces.empty()) {
    const auto traces = load_traces(opt.traces);
    const TraceAnomalyReport anomalies = analyze_traces(traces, config.thresholds);
    report["traces"] = to_json(anomalies);
    std::cout << format_table(anomalies);
    flagged = flagged || anomalies.flagged_count() > 0;
  }

  const fs::path out = !opt.out.empty() ? fs::path(opt.out)
                       : have_diff
                           ? config.root / "reports" /
                                 ("detect-" + url_encode(opt.article) + "-" + std::to_string(opt.old_rev) + "-" +
                                  std::to_string(opt.new_rev) + ".json")
                           : config.root / "reports" / "detect-traces.json";
  write_file(out, report.dump(2) + "\n");
  std::cout << "report written to " << out.string() << "\n";
  return flagged ? kExitFlagged : kExitOk;
}

int cmd_metrics(const Options& opt) {
  const WorkspaceConfig config = workspace_for(opt);
  Sandbox sandbox(config, opt.wall_clock);
  std::set<std::uint64_t> ids;
  for (const auto& item : split_list(opt.manipulated)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || used == 0) throw UsageError("bad revision id '" + item + "'");
    ids.insert(v);
  }
  if (ids.empty()) throw UsageError("--manipulated needs at least one revision id");
  const auto history = sandbox.store.get_history(opt.article);
  const SurvivalMetrics metrics = survival_metrics(history, ids);
  std::cout << format_table(metrics);
  nlohmann::json report = {{"format_version", kReportFormatVersion},
                           {"article_id", opt.article},
                           {"survival", to_json(metrics)}};
  const fs::path out = !opt.out.empty() ? fs::path(opt.out)
                                        : config.root / "reports" / ("metrics-" + url_encode(opt.article) + ".json");
  write_file(out, report.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated-wiki sandbox for Markov-chain word substitution attacks and their forensics"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("-w,--workspace", opt.workspace, std::string("Workspace root (default $") + kWorkspaceEnv + " or .)");
  app.add_flag("--wall-clock", opt.wall_clock, "Sleep for simulated pauses instead of only advancing virtual time");

  std::function<int()> handler;
  auto bind = [&handler](CLI::App* sub, int (*fn)(const Options&), const Options& o) {
    sub->callback([&handler, fn, &o] { handler = [fn, &o] { return fn(o); }; });
  };

  auto* ingest = app.add_subcommand("ingest", "Store a corpus from local files or a read-only wiki fetch");
  ingest->add_option("--label", opt.label, "Corpus label")->required();
  auto* from_dir = ingest->add_option("--from-dir", opt.from_dir, "Directory of .txt documents")->check(CLI::ExistingDirectory);
  auto* fetch = ingest->add_option("--fetch-titles", opt.fetch_titles, "Comma-separated article titles")
                    ->each([&opt](const std::string&) { opt.fetch_given = true; });
  from_dir->excludes(fetch);
  ingest->add_option("--endpoint", opt.endpoint, "MediaWiki api.php URL")->needs(fetch);
  ingest->add_option("--rate-limit", opt.rate_limit, "Seconds between requests (>= 1)");
  ingest->add_flag("--strip-markup", opt.strip_markup, "Remove wiki markup before storing");
  bind(ingest, cmd_ingest, opt);

  auto* train_cmd = app.add_subcommand("train", "Train a Markov chain on a stored corpus");
  train_cmd->add_option("--corpus", opt.corpus, "Corpus label")->required();
  train_cmd->add_option("--order", opt.order, "Chain order")->check(CLI::Range(1, 16));
  train_cmd->add_option("--out", opt.out, "Chain file to write")->required();
  train_cmd->add_flag("--no-document-boundaries", opt.no_boundaries, "Let contexts span documents");
  bind(train_cmd, cmd_train, opt);

  auto* dump = app.add_subcommand("dump", "List the transitions of a chain file");
  dump->add_option("--chain", opt.chain, "Chain file")->required()->check(CLI::ExistingFile);
  dump->add_flag("--all-orders", opt.all_orders, "Include the lower-order backoff tables");
  bind(dump, cmd_dump, opt);

  auto* store = app.add_subcommand("store", "Inspect or edit the simulated wiki");
  store->require_subcommand(1);
  auto* create = store->add_subcommand("create", "Create an article");
  create->add_option("--article", opt.article)->required();
  create->add_option("--file", opt.file, "Initial text")->required()->check(CLI::ExistingFile);
  create->add_option("--editor", opt.editor);
  create->add_option("--advance", opt.advance, "Simulated seconds to advance first")->check(CLI::NonNegativeNumber);
  bind(create, cmd_store_create, opt);
  auto* edit = store->add_subcommand("edit", "Submit an edit as a registered account");
  edit->add_option("--article", opt.article)->required();
  edit->add_option("--file", opt.file, "New text")->required()->check(CLI::ExistingFile);
  edit->add_option("--account", opt.account)->required();
  edit->add_option("--comment", opt.comment);
  edit->add_option("--advance", opt.advance)->check(CLI::NonNegativeNumber);
  bind(edit, cmd_store_edit, opt);
  auto* revert = store->add_subcommand("revert", "Restore an earlier revision as a new revision");
  revert->add_option("--article", opt.article)->required();
  revert->add_option("--to", opt.to_revision)->required();
  revert->add_option("--moderator", opt.moderator);
  revert->add_option("--advance", opt.advance)->check(CLI::NonNegativeNumber);
  bind(revert, cmd_store_revert, opt);
  auto* history = store->add_subcommand("history", "List revisions");
  history->add_option("--article", opt.article)->required();
  bind(history, cmd_store_history, opt);
  auto* show = store->add_subcommand("show", "Print a revision's text");
  show->add_option("--article", opt.article)->required();
  show->add_option("--rev", opt.revision, "Revision id (default latest)");
  bind(show, cmd_store_show, opt);

  auto* accounts = app.add_subcommand("accounts", "Manage simulated editor accounts");
  accounts->require_subcommand(1);
  auto* acreate = accounts->add_subcommand("create", "Generate accounts from name lists");
  acreate->add_option("--first-names", opt.first_names)->check(CLI::ExistingFile);
  acreate->add_option("--last-names", opt.last_names)->check(CLI::ExistingFile);
  acreate->add_option("--count", opt.count)->check(CLI::Range(1, 100000));
  acreate->add_option("--password-length", opt.password_length)->check(CLI::Range(12, 256));
  acreate->add_option("--seed", opt.seed)->each([&opt](const std::string&) { opt.seed_set = true; });
  bind(acreate, cmd_accounts_create, opt);

  auto* attack = app.add_subcommand("attack", "Build a MIM object for an article and optionally execute it");
  attack->add_option("--chain", opt.chain, "Chain file")->check(CLI::ExistingFile);
  attack->add_option("--article", opt.article);
  attack->add_option("--targets", opt.targets, "Comma-separated target words");
  attack->add_option("--seed", opt.seed)->each([&opt](const std::string&) { opt.seed_set = true; });
  attack->add_option("--out", opt.out, "MIM object file to write");
  attack->add_option("--from-mim", opt.from_mim, "Use an existing MIM object")->check(CLI::ExistingFile);
  attack->add_flag("--execute", opt.execute, "Run a bot session against the local store");
  attack->add_option("--account", opt.account, "Registered account for --execute");
  attack->add_option("--first-names", opt.first_names)->check(CLI::ExistingFile);
  attack->add_option("--last-names", opt.last_names)->check(CLI::ExistingFile);
  attack->add_option("--browse-depth", opt.browse_depth)->check(CLI::NonNegativeNumber);
  attack->add_option("--pause", opt.pause, "fixed:D | uniform:LO,HI | lognormal:MU,SIGMA");
  attack->add_flag("--resample-identical", opt.resample_identical, "Redraw replacements equal to the target");
  attack->add_flag("--case-sensitive", opt.case_sensitive);
  bind(attack, cmd_attack, opt);

  auto* detect = app.add_subcommand("detect", "Diff revisions, attribute substitutions, analyze session traces");
  detect->add_option("--article", opt.article);
  detect->add_option("--old", opt.old_rev)->check(CLI::PositiveNumber);
  detect->add_option("--new", opt.new_rev)->check(CLI::PositiveNumber);
  detect->add_option("--candidates", opt.candidates, "Comma-separated corpus labels");
  detect->add_option("--order", opt.order, "Attribution chain order")->check(CLI::Range(1, 16));
  detect->add_option("--context", opt.context, "Context tokens recorded per substitution")->check(CLI::Range(1, 16));
  detect->add_option("--traces", opt.traces, "JSON-lines session trace file")->check(CLI::ExistingFile);
  detect->add_option("--out", opt.out, "JSON report file");
  bind(detect, cmd_detect, opt);

  auto* metrics = app.add_subcommand("metrics", "Edit-survival metrics for manipulated revisions");
  metrics->add_option("--article", opt.article)->required();
  metrics->add_option("--manipulated", opt.manipulated, "Comma-separated revision ids")->required();
  metrics->add_option("--out", opt.out, "JSON report file");
  bind(metrics, cmd_metrics, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return handler ? handler() : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
