#include "wikimim/wikisim.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "wikimim/error.hpp"
#include "wikimim/hash.hpp"

namespace wikimim {

// ---------------------------------------------------------------------------
// clock

void SimClock::advance(duration d) {
  if (d.count() < 0) throw Error("cannot move the simulated clock backwards");
  now_us_.fetch_add(d.count());
  if (wall_clock_) std::this_thread::sleep_for(d);
}

void SimClock::advance_to(time_point t) {
  std::int64_t target = t.time_since_epoch().count();
  std::int64_t current = now_us_.load();
  while (current < target && !now_us_.compare_exchange_weak(current, target)) {
  }
}

SimDuration from_seconds(double seconds) {
  return SimDuration(static_cast<std::int64_t>(std::llround(seconds * 1e6)));
}

double to_seconds(SimDuration d) { return static_cast<double>(d.count()) / 1e6; }

// ---------------------------------------------------------------------------
// accounts

namespace {

constexpr std::string_view kPasswordAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789!#$%&*+-=?@^_~";

}  // namespace

Credentials AccountRegistry::generate_credentials(std::span<const std::string> first_names,
                                                  std::span<const std::string> last_names,
                                                  Rng& rng, std::size_t password_length) {
  if (first_names.empty() || last_names.empty()) throw Error("name lists must not be empty");
  if (password_length < kMinPasswordLength) {
    throw Error("password length must be at least " + std::to_string(kMinPasswordLength));
  }
  const std::string& first = first_names[rng.uniform_int(first_names.size())];
  const std::string& last = last_names[rng.uniform_int(last_names.size())];
  std::string password;
  for (std::size_t i = 0; i < password_length; ++i) {
    password.push_back(kPasswordAlphabet[rng.uniform_int(kPasswordAlphabet.size())]);
  }

  const std::string base = first + last;
  std::unique_lock lock(mutex_);
  std::string username = base;
  for (int suffix = 1; accounts_.contains(username); ++suffix) {
    if (suffix > 99) throw Error("all disambiguators for '" + base + "' are taken");
    username = base + (suffix < 10 ? "0" : "") + std::to_string(suffix);
  }
  Credentials credentials{username, std::move(password)};
  accounts_.emplace(username, credentials);
  return credentials;
}

void AccountRegistry::add(Credentials credentials) {
  if (credentials.username.empty()) throw Error("username must not be empty");
  std::unique_lock lock(mutex_);
  const std::string name = credentials.username;
  if (!accounts_.emplace(name, std::move(credentials)).second) {
    throw Error("account '" + name + "' already exists");
  }
}

bool AccountRegistry::contains(std::string_view username) const {
  std::shared_lock lock(mutex_);
  return accounts_.find(username) != accounts_.end();
}

std::vector<Credentials> AccountRegistry::accounts() const {
  std::shared_lock lock(mutex_);
  std::vector<Credentials> out;
  for (const auto& [name, creds] : accounts_) out.push_back(creds);
  return out;
}

std::size_t AccountRegistry::size() const {
  std::shared_lock lock(mutex_);
  return accounts_.size();
}

void AccountRegistry::save(const std::filesystem::path& path) const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : accounts()) list.push_back({{"username", c.username}, {"password", c.password}});
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << nlohmann::json{{"format_version", 1}, {"accounts", std::move(list)}}.dump(2) << "\n";
  if (!out) throw Error("cannot write account registry '" + path.string() + "'");
}

void AccountRegistry::load_into(AccountRegistry& registry, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return;
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw FormatError("account registry '" + path.string() + "' is not JSON");
  try {
    if (doc.at("format_version").get<int>() != 1) {
      throw FormatError("account registry: unsupported format_version");
    }
    for (const auto& a : doc.at("accounts")) {
      registry.add({a.at("username").get<std::string>(), a.at("password").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("account registry: ") + e.what());
  }
}

std::vector<std::string> load_name_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read name list '" + path.string() + "'");
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    if (start < line.size()) names.push_back(line.substr(start));
  }
  return names;
}

// ---------------------------------------------------------------------------
// article store

std::string revision_to_json_line(const Revision& r) {
  nlohmann::json j = {{"article_id", r.article_id},
                      {"revision_id", r.revision_id},
                      {"parent", r.parent ? nlohmann::json(*r.parent) : nlohmann::json(nullptr)},
                      {"editor", r.editor},
                      {"timestamp_us", r.timestamp.time_since_epoch().count()},
                      {"comment", r.comment},
                      {"text", r.text}};
  return j.dump();
}

Revision revision_from_json_line(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw FormatError("revision line is not valid JSON");
  try {
    Revision r;
    r.article_id = j.at("article_id").get<std::string>();
    r.revision_id = j.at("revision_id").get<std::uint64_t>();
    if (!j.at("parent").is_null()) r.parent = j.at("parent").get<std::uint64_t>();
    r.editor = j.at("editor").get<std::string>();
    r.timestamp = SimInstant(SimDuration(j.at("timestamp_us").get<std::int64_t>()));
    r.comment = j.at("comment").get<std::string>();
    r.text = j.at("text").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("revision line: ") + e.what());
  }
}

void ArticleStore::replay_journal(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::unique_lock lock(mutex_);
  std::string line;
  std::size_t line_no = 0;
  SimInstant latest{};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Revision r;
    try {
      r = revision_from_json_line(line);
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto& history = articles_[r.article_id];
    const std::uint64_t expected = history.size() + 1;
    const std::optional<std::uint64_t> expected_parent =
        history.empty() ? std::nullopt : std::optional<std::uint64_t>(history.back().revision_id);
    if (r.revision_id != expected || r.parent != expected_parent) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": revision " +
                        std::to_string(r.revision_id) + " of '" + r.article_id +
                        "' breaks the revision chain");
    }
    if (!history.empty() && r.timestamp < history.back().timestamp) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": timestamp goes backwards");
    }
    latest = std::max(latest, r.timestamp);
    history.push_back(std::move(r));
  }
  clock_.advance_to(latest);
}

void ArticleStore::attach_journal(const std::filesystem::path& path) {
  std::unique_lock lock(mutex_);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  journal_.emplace(path, std::ios::binary | std::ios::app);
  if (!*journal_) throw Error("cannot open revision journal '" + path.string() + "'");
}

const std::vector<Revision>& ArticleStore::history_locked(const std::string& article_id) const {
  const auto it = articles_.find(article_id);
  if (it == articles_.end()) throw NotFoundError("unknown article '" + article_id + "'");
  return it->second;
}

Revision ArticleStore::append_locked(const std::string& article_id, std::string text,
                                     std::string editor, std::string comment) {
  auto& history = articles_[article_id];
  Revision r;
  r.article_id = article_id;
  r.revision_id = history.size() + 1;
  if (!history.empty()) r.parent = history.back().revision_id;
  r.text = std::move(text);
  r.editor = std::move(editor);
  r.timestamp = clock_.now();
  r.comment = std::move(comment);
  if (journal_) {
    *journal_ << revision_to_json_line(r) << '\n';
    journal_->flush();
    if (!*journal_) throw Error("failed to append to revision journal");
  }
  history.push_back(r);
  return r;
}

Revision ArticleStore::create_article(const std::string& article_id, std::string text,
                                      const std::string& editor, std::string comment) {
  if (article_id.empty()) throw Error("article id must not be empty");
  std::unique_lock lock(mutex_);
  if (articles_.contains(article_id)) throw Error("article '" + article_id + "' already exists");
  return append_locked(article_id, std::move(text), editor, std::move(comment));
}

Revision ArticleStore::submit_edit(const std::string& account, const std::string& article_id,
                                   std::string new_text, std::string comment) {
  if (!accounts_.contains(account)) throw NotFoundError("unknown account '" + account + "'");
  std::unique_lock lock(mutex_);
  history_locked(article_id);
  return append_locked(article_id, std::move(new_text), account, std::move(comment));
}

Revision ArticleStore::revert(const std::string& article_id, std::uint64_t to_revision_id,
                              const std::string& moderator) {
  std::unique_lock lock(mutex_);
  const auto& history = history_locked(article_id);
  if (to_revision_id == 0 || to_revision_id > history.size()) {
    throw NotFoundError("article '" + article_id + "' has no revision " + std::to_string(to_revision_id));
  }
  std::string text = history[to_revision_id - 1].text;
  return append_locked(article_id, std::move(text), moderator,
                       "revert to " + std::to_string(to_revision_id));
}

std::string ArticleStore::get_text(const std::string& article_id) const {
  std::shared_lock lock(mutex_);
  return history_locked(article_id).back().text;
}

Revision ArticleStore::latest(const std::string& article_id) const {
  std::shared_lock lock(mutex_);
  return history_locked(article_id).back();
}

Revision ArticleStore::get_revision(const std::string& article_id, std::uint64_t revision_id) const {
  std::shared_lock lock(mutex_);
  const auto& history = history_locked(article_id);
  if (revision_id == 0 || revision_id > history.size()) {
    throw NotFoundError("article '" + article_id + "' has no revision " + std::to_string(revision_id));
  }
  return history[revision_id - 1];
}

std::vector<Revision> ArticleStore::get_history(const std::string& article_id) const {
  std::shared_lock lock(mutex_);
  return history_locked(article_id);
}

std::vector<std::string> ArticleStore::article_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, history] : articles_) ids.push_back(id);
  return ids;
}

bool ArticleStore::has_article(const std::string& article_id) const {
  std::shared_lock lock(mutex_);
  return articles_.contains(article_id);
}

// ---------------------------------------------------------------------------
// behavior

void validate(const PauseDistribution& pause) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FixedPause>) {
          if (!(p.seconds > 0.0) || !std::isfinite(p.seconds)) throw Error("fixed pause must be positive");
        } else if constexpr (std::is_same_v<T, UniformPause>) {
          if (!(p.lo > 0.0) || !(p.hi >= p.lo) || !std::isfinite(p.hi)) {
            throw Error("uniform pause needs 0 < lo <= hi");
          }
        } else {
          if (!std::isfinite(p.mu) || !(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
            throw Error("lognormal pause needs finite mu and sigma >= 0");
          }
        }
      },
      pause);
}

double sample_pause_seconds(const PauseDistribution& pause, Rng& rng) {
  return std::visit(
      [&rng](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FixedPause>) {
          return p.seconds;
        } else if constexpr (std::is_same_v<T, UniformPause>) {
          return rng.uniform(p.lo, p.hi);
        } else {
          return rng.lognormal(p.mu, p.sigma);
        }
      },
      pause);
}

namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(field, &used);
    } catch (const std::exception&) {
      throw Error("'" + field + "' is not a number");
    }
    if (used != field.size()) throw Error("'" + field + "' is not a number");
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

PauseDistribution parse_pause(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) throw Error("pause spec '" + std::string(spec) + "' lacks ':'");
  const std::string_view kind = spec.substr(0, colon);
  const auto args = parse_numbers(spec.substr(colon + 1));
  PauseDistribution pause;
  if (kind == "fixed" && args.size() == 1) {
    pause = FixedPause{args[0]};
  } else if (kind == "uniform" && args.size() == 2) {
    pause = UniformPause{args[0], args[1]};
  } else if (kind == "lognormal" && args.size() == 2) {
    pause = LognormalPause{args[0], args[1]};
  } else {
    throw Error("unrecognized pause spec '" + std::string(spec) + "'");
  }
  validate(pause);
  return pause;
}

std::string format_pause(const PauseDistribution& pause) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FixedPause>) {
          return "fixed:" + format_double(p.seconds);
        } else if constexpr (std::is_same_v<T, UniformPause>) {
          return "uniform:" + format_double(p.lo) + "," + format_double(p.hi);
        } else {
          return "lognormal:" + format_double(p.mu) + "," + format_double(p.sigma);
        }
      },
      pause);
}

std::string_view to_string(SessionEventKind kind) {
  switch (kind) {
    case SessionEventKind::login: return "login";
    case SessionEventKind::view_page: return "view_page";
    case SessionEventKind::click_link: return "click_link";
    case SessionEventKind::open_editor: return "open_editor";
    case SessionEventKind::submit_edit: return "submit_edit";
    case SessionEventKind::logout: return "logout";
  }
  return "unknown";
}

SessionEventKind parse_event_kind(std::string_view name) {
  for (auto kind : {SessionEventKind::login, SessionEventKind::view_page, SessionEventKind::click_link,
                    SessionEventKind::open_editor, SessionEventKind::submit_edit, SessionEventKind::logout}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error("unknown session event kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// sessions

BotSessionResult run_bot_session(ArticleStore& store, const std::string& account,
                                 const std::string& target_article, const MimObject& mim,
                                 const BehaviorConfig& behavior) {
  validate(behavior.pause);
  if (behavior.browse_depth < 0) throw Error("browse depth must be nonnegative");
  if (!store.has_article(target_article)) throw NotFoundError("unknown article '" + target_article + "'");

  SimClock& clock = store.clock();
  Rng rng(behavior.seed);
  BotSessionResult result;
  result.trace.account = account;
  auto emit = [&](SessionEventKind kind, std::string page) {
    result.trace.events.push_back({kind, std::move(page), clock.now()});
  };
  auto pause_then = [&](SessionEventKind kind, std::string page) {
    SimDuration d = from_seconds(sample_pause_seconds(behavior.pause, rng));
    if (d.count() < 1) d = SimDuration(1);
    clock.advance(d);
    emit(kind, std::move(page));
  };

  emit(SessionEventKind::login, std::string(kLoginPage));

  std::vector<std::string> related;
  for (auto& id : store.article_ids()) {
    if (id != target_article) related.push_back(std::move(id));
  }
  for (int step = 0; step < behavior.browse_depth; ++step) {
    const std::string page =
        related.empty() ? target_article : related[rng.uniform_int(related.size())];
    if (step > 0) pause_then(SessionEventKind::click_link, page);
    pause_then(SessionEventKind::view_page, page);
  }
  if (behavior.browse_depth > 0) pause_then(SessionEventKind::click_link, target_article);

  pause_then(SessionEventKind::open_editor, target_article);
  const std::string current = store.get_text(target_article);
  if (sha256_hex(current) != mim.base_text_hash) {
    result.trace.abandoned = true;
  } else {
    std::string manipulated = wikimim::apply(mim, current);
    pause_then(SessionEventKind::submit_edit, target_article);
    result.revision = store.submit_edit(account, target_article, std::move(manipulated), "copyedit");
  }
  pause_then(SessionEventKind::logout, std::string(kLogoutPage));
  return result;
}

std::string trace_to_json_line(const SessionTrace& trace) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : trace.events) {
    events.push_back({{"kind", to_string(e.kind)},
                      {"page", e.page_id},
                      {"t_us", e.timestamp.time_since_epoch().count()}});
  }
  return nlohmann::json{{"account", trace.account}, {"abandoned", trace.abandoned}, {"events", events}}.dump();
}

SessionTrace trace_from_json_line(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw FormatError("trace line is not valid JSON");
  try {
    SessionTrace trace;
    trace.account = j.at("account").get<std::string>();
    trace.abandoned = j.value("abandoned", false);
    for (const auto& e : j.at("events")) {
      trace.events.push_back({parse_event_kind(e.at("kind").get<std::string>()),
                              e.at("page").get<std::string>(),
                              SimInstant(SimDuration(e.at("t_us").get<std::int64_t>()))});
    }
    return trace;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("trace line: ") + e.what());
  }
}

std::vector<SessionTrace> load_traces(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read trace file '" + path.string() + "'");
  std::vector<SessionTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    traces.push_back(trace_from_json_line(line));
  }
  return traces;
}

}  // namespace wikimim
