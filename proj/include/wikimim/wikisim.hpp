#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wikimim/mim.hpp"
#include "wikimim/rng.hpp"

namespace wikimim {

// Virtual time for the simulated wiki, in microseconds since the start of
// the simulation. Advancing is thread-safe. In wall-clock mode advance() also
// sleeps for the same duration.
class SimClock {
 public:
  using rep = std::int64_t;
  using period = std::micro;
  using duration = std::chrono::microseconds;
  using time_point = std::chrono::time_point<SimClock>;
  static constexpr bool is_steady = true;

  explicit SimClock(time_point start = time_point{}, bool wall_clock = false)
      : now_us_(start.time_since_epoch().count()), wall_clock_(wall_clock) {}

  time_point now() const { return time_point(duration(now_us_.load())); }

  // Throws Error for a negative duration.
  void advance(duration d);

  // Moves the clock forward to `t`; earlier instants are ignored.
  void advance_to(time_point t);

  bool wall_clock() const { return wall_clock_; }

 private:
  std::atomic<std::int64_t> now_us_;
  bool wall_clock_;
};

using SimDuration = SimClock::duration;
using SimInstant = SimClock::time_point;

SimDuration from_seconds(double seconds);
double to_seconds(SimDuration d);

// ---------------------------------------------------------------------------
// accounts

struct Credentials {
  std::string username;
  std::string password;

  bool operator==(const Credentials&) const = default;
};

inline constexpr std::size_t kMinPasswordLength = 12;

class AccountRegistry {
 public:
  // Username is a random first name followed by a random last name; a
  // two-digit suffix 01..99 is appended when the plain name is taken. The
  // account is registered before returning. Throws Error on an empty name
  // list, a password shorter than 12 characters, or when all 100 variants
  // of the drawn name are taken.
  Credentials generate_credentials(std::span<const std::string> first_names,
                                   std::span<const std::string> last_names, Rng& rng,
                                   std::size_t password_length = 16);

  // Throws Error if the username is empty or already registered.
  void add(Credentials credentials);

  bool contains(std::string_view username) const;
  std::vector<Credentials> accounts() const;
  std::size_t size() const;

  // JSON document {format_version, accounts: [{username, password}]}.
  void save(const std::filesystem::path& path) const;
  static void load_into(AccountRegistry& registry, const std::filesystem::path& path);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, Credentials, std::less<>> accounts_;
};

// Newline-delimited UTF-8 name list; blank lines are ignored.
std::vector<std::string> load_name_list(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// article store

struct Revision {
  std::string article_id;
  std::uint64_t revision_id = 0;
  std::string text;
  std::string editor;
  SimInstant timestamp{};
  std::optional<std::uint64_t> parent;
  std::string comment;

  bool operator==(const Revision&) const = default;
};

// Append-only revision history per article. Writes are serialized; reads
// may run concurrently. Timestamps come from the clock passed at
// construction; submit_edit() only accepts accounts known to `accounts`.
// Both referenced objects must outlive the store.
class ArticleStore {
 public:
  ArticleStore(SimClock& clock, const AccountRegistry& accounts)
      : clock_(clock), accounts_(accounts) {}

  ArticleStore(const ArticleStore&) = delete;
  ArticleStore& operator=(const ArticleStore&) = delete;

  // Replays a JSON-lines journal (one revision per line) into this store and
  // moves the clock to the latest timestamp. Throws FormatError on a line
  // that breaks revision ordering. A missing file is an empty history.
  void replay_journal(const std::filesystem::path& path);

  // Every subsequent revision is appended to `path` as one JSON line.
  void attach_journal(const std::filesystem::path& path);

  Revision create_article(const std::string& article_id, std::string text,
                          const std::string& editor, std::string comment = "create");
  Revision submit_edit(const std::string& account, const std::string& article_id,
                       std::string new_text, std::string comment);
  // Appends a new revision carrying the text of `to_revision_id`.
  Revision revert(const std::string& article_id, std::uint64_t to_revision_id,
                  const std::string& moderator);

  std::string get_text(const std::string& article_id) const;
  Revision latest(const std::string& article_id) const;
  Revision get_revision(const std::string& article_id, std::uint64_t revision_id) const;
  std::vector<Revision> get_history(const std::string& article_id) const;
  std::vector<std::string> article_ids() const;
  bool has_article(const std::string& article_id) const;

  SimClock& clock() const { return clock_; }

 private:
  const std::vector<Revision>& history_locked(const std::string& article_id) const;
  Revision append_locked(const std::string& article_id, std::string text, std::string editor,
                         std::string comment);

  SimClock& clock_;
  const AccountRegistry& accounts_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<Revision>> articles_;
  std::optional<std::ofstream> journal_;
};

std::string revision_to_json_line(const Revision& revision);
Revision revision_from_json_line(std::string_view line);

// ---------------------------------------------------------------------------
// bot sessions

struct FixedPause {
  double seconds = 1.0;
};
struct UniformPause {
  double lo = 1.0;
  double hi = 2.0;
};
// Pause = exp(N(mu, sigma^2)) seconds.
struct LognormalPause {
  double mu = 0.0;
  double sigma = 1.0;
};
using PauseDistribution = std::variant<FixedPause, UniformPause, LognormalPause>;

// Throws Error unless every duration the distribution can produce is
// positive.
void validate(const PauseDistribution& pause);
double sample_pause_seconds(const PauseDistribution& pause, Rng& rng);

// "fixed:D", "uniform:LO,HI" or "lognormal:MU,SIGMA". Throws Error.
PauseDistribution parse_pause(std::string_view spec);
std::string format_pause(const PauseDistribution& pause);

struct BehaviorConfig {
  PauseDistribution pause = FixedPause{1.0};
  int browse_depth = 0;  // related pages visited before the target
  std::uint64_t seed = 0;
};

enum class SessionEventKind { login, view_page, click_link, open_editor, submit_edit, logout };

std::string_view to_string(SessionEventKind kind);
// Throws Error for an unknown name.
SessionEventKind parse_event_kind(std::string_view name);

struct SessionEvent {
  SessionEventKind kind = SessionEventKind::login;
  std::string page_id;
  SimInstant timestamp{};

  bool operator==(const SessionEvent&) const = default;
};

struct SessionTrace {
  std::string account;
  std::vector<SessionEvent> events;
  bool abandoned = false;  // logged out without submitting

  bool operator==(const SessionTrace&) const = default;
};

struct BotSessionResult {
  std::optional<Revision> revision;  // absent when the session was abandoned
  SessionTrace trace;
};

inline constexpr std::string_view kLoginPage = "Special:UserLogin";
inline constexpr std::string_view kLogoutPage = "Special:UserLogout";

// Plays one editing session against the store: login, `browse_depth` visits
// to randomly chosen other articles, open the editor on the target, submit
// apply(mim, current text), logout. Each event after login is preceded by a
// pause drawn from the behavior's distribution on the store's clock. When
// the MIM object no longer matches the article, the session logs out
// without editing and the trace is marked abandoned.
BotSessionResult run_bot_session(ArticleStore& store, const std::string& account,
                                 const std::string& target_article, const MimObject& mim,
                                 const BehaviorConfig& behavior);

std::string trace_to_json_line(const SessionTrace& trace);
SessionTrace trace_from_json_line(std::string_view line);
// Reads every non-blank line of a JSON-lines trace file. Throws Error.
std::vector<SessionTrace> load_traces(const std::filesystem::path& path);

}  // namespace wikimim
