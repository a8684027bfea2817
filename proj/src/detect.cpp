#include "wikimim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "wikimim/error.hpp"

namespace wikimim {

// ---------------------------------------------------------------------------
// alignment

namespace {

// Hirschberg's divide and conquer over an additive score: a match scores
// `match_weight` (larger than any possible number of substitutions, so the
// match count dominates), a substitution 1, an insertion or deletion 0.
class Aligner {
 public:
  Aligner(std::vector<int> a, std::vector<int> b)
      : a_(std::move(a)), b_(std::move(b)),
        match_weight_(static_cast<std::int64_t>(std::min(a_.size(), b_.size())) + 1) {}

  std::vector<AlignStep> run() {
    std::size_t prefix = 0;
    while (prefix < a_.size() && prefix < b_.size() && a_[prefix] == b_[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < a_.size() - prefix && suffix < b_.size() - prefix &&
           a_[a_.size() - 1 - suffix] == b_[b_.size() - 1 - suffix]) {
      ++suffix;
    }
    for (std::size_t i = 0; i < prefix; ++i) steps_.push_back({AlignOp::match, i, i});
    solve(prefix, a_.size() - suffix, prefix, b_.size() - suffix);
    for (std::size_t k = suffix; k > 0; --k) {
      steps_.push_back({AlignOp::match, a_.size() - k, b_.size() - k});
    }
    return std::move(steps_);
  }

 private:
  std::int64_t pair_score(std::size_t i, std::size_t j) const {
    return a_[i] == b_[j] ? match_weight_ : 1;
  }

  // Last row of the score table for a[alo, ahi) against every prefix of
  // b[blo, bhi).
  std::vector<std::int64_t> forward_row(std::size_t alo, std::size_t ahi, std::size_t blo,
                                        std::size_t bhi) const {
    const std::size_t m = bhi - blo;
    std::vector<std::int64_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = alo; i < ahi; ++i) {
      cur[0] = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        cur[j] = std::max({prev[j - 1] + pair_score(i, blo + j - 1), prev[j], cur[j - 1]});
      }
      std::swap(prev, cur);
    }
    return prev;
  }

  // row[j] = score of a[alo, ahi) against b[blo + j, bhi).
  std::vector<std::int64_t> backward_row(std::size_t alo, std::size_t ahi, std::size_t blo,
                                         std::size_t bhi) const {
    const std::size_t m = bhi - blo;
    std::vector<std::int64_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = ahi; i-- > alo;) {
      cur[m] = 0;
      for (std::size_t j = m; j-- > 0;) {
        cur[j] = std::max({prev[j + 1] + pair_score(i, blo + j), prev[j], cur[j + 1]});
      }
      std::swap(prev, cur);
    }
    return prev;
  }

  void solve_small(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) {
    const std::size_t n = ahi - alo;
    const std::size_t m = bhi - blo;
    std::vector<std::int64_t> table((n + 1) * (m + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> std::int64_t& { return table[i * (m + 1) + j]; };
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 1; j <= m; ++j) {
        at(i, j) = std::max({at(i - 1, j - 1) + pair_score(alo + i - 1, blo + j - 1), at(i - 1, j),
                             at(i, j - 1)});
      }
    }
    std::vector<AlignStep> reversed;
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
      if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + pair_score(alo + i - 1, blo + j - 1)) {
        const bool same = a_[alo + i - 1] == b_[blo + j - 1];
        reversed.push_back({same ? AlignOp::match : AlignOp::substitute, alo + i - 1, blo + j - 1});
        --i;
        --j;
      } else if (i > 0 && at(i, j) == at(i - 1, j)) {
        reversed.push_back({AlignOp::remove, alo + i - 1, 0});
        --i;
      } else {
        reversed.push_back({AlignOp::insert, 0, blo + j - 1});
        --j;
      }
    }
    steps_.insert(steps_.end(), reversed.rbegin(), reversed.rend());
  }

  void solve(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) {
    const std::size_t n = ahi - alo;
    const std::size_t m = bhi - blo;
    if (n == 0) {
      for (std::size_t j = blo; j < bhi; ++j) steps_.push_back({AlignOp::insert, 0, j});
      return;
    }
    if (m == 0) {
      for (std::size_t i = alo; i < ahi; ++i) steps_.push_back({AlignOp::remove, i, 0});
      return;
    }
    if (n == 1 || m == 1 || n * m <= 4096) {
      solve_small(alo, ahi, blo, bhi);
      return;
    }
    const std::size_t mid = alo + n / 2;
    const auto upper = forward_row(alo, mid, blo, bhi);
    const auto lower = backward_row(mid, ahi, blo, bhi);
    std::size_t split = 0;
    std::int64_t best = upper[0] + lower[0];
    for (std::size_t j = 1; j <= m; ++j) {
      if (upper[j] + lower[j] > best) {
        best = upper[j] + lower[j];
        split = j;
      }
    }
    solve(alo, mid, blo, blo + split);
    solve(mid, ahi, blo + split, bhi);
  }

  std::vector<int> a_;
  std::vector<int> b_;
  std::int64_t match_weight_;
  std::vector<AlignStep> steps_;
};

Context window(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
  return Context(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                 tokens.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace

std::vector<AlignStep> align_words(std::span<const std::string> old_words,
                                   std::span<const std::string> new_words) {
  std::unordered_map<std::string_view, int> ids;
  auto intern = [&ids](std::span<const std::string> words) {
    std::vector<int> out;
    out.reserve(words.size());
    for (const auto& w : words) {
      out.push_back(ids.emplace(w, static_cast<int>(ids.size())).first->second);
    }
    return out;
  };
  auto a = intern(old_words);
  auto b = intern(new_words);
  return Aligner(std::move(a), std::move(b)).run();
}

std::vector<AlignStep> align_revisions(const TokenStream& old_stream, const TokenStream& new_stream) {
  const auto old_words = stripped_words(old_stream);
  const auto new_words = stripped_words(new_stream);
  if (old_stream.separators != new_stream.separators) return align_words(old_words, new_words);

  std::vector<AlignStep> steps;
  steps.reserve(old_words.size());
  for (std::size_t i = 0; i < old_words.size(); ++i) {
    steps.push_back({old_words[i] == new_words[i] ? AlignOp::match : AlignOp::substitute, i, i});
  }
  return steps;
}

RevisionDiff diff_revisions(std::string_view old_text, std::string_view new_text,
                            std::size_t context_size) {
  const TokenStream old_stream = tokenize(old_text);
  const TokenStream new_stream = tokenize(new_text);
  const auto old_words = stripped_words(old_stream);
  const auto new_words = stripped_words(new_stream);
  const auto new_tokens = token_texts(new_stream);

  RevisionDiff diff;
  for (const auto& step : align_revisions(old_stream, new_stream)) {
    switch (step.op) {
      case AlignOp::match:
        break;
      case AlignOp::substitute: {
        const std::size_t j = step.new_index;
        Substitution s;
        s.token_index = j;
        s.old_index = step.old_index;
        s.old_word = old_words[step.old_index];
        s.new_word = new_words[j];
        s.left_context = window(new_tokens, j > context_size ? j - context_size : 0, j);
        s.right_context = window(new_tokens, j + 1, std::min(new_tokens.size(), j + 1 + context_size));
        diff.substitutions.push_back(std::move(s));
        break;
      }
      case AlignOp::insert:
        diff.insertions.push_back({step.new_index, new_words[step.new_index]});
        break;
      case AlignOp::remove:
        diff.deletions.push_back({step.old_index, old_words[step.old_index]});
        break;
    }
  }
  return diff;
}

// ---------------------------------------------------------------------------
// attribution

std::size_t context_search(std::span<const std::string> phrase, const Corpus& corpus) {
  if (phrase.empty()) throw Error("context_search: empty phrase");
  std::vector<std::string> needle;
  for (const auto& p : phrase) needle.push_back(Token::from_text(p).stripped);
  std::size_t hits = 0;
  for (const auto& doc : corpus.documents) {
    const auto words = stripped_words(tokenize(doc.raw_text));
    if (words.size() < needle.size()) continue;
    for (std::size_t i = 0; i + needle.size() <= words.size(); ++i) {
      if (std::equal(needle.begin(), needle.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) ++hits;
    }
  }
  return hits;
}

double backoff_word_probability(const MarkovChain& chain, std::span<const std::string> context,
                                std::string_view word) {
  const auto* entry = find_with_backoff(chain, context);
  if (entry == nullptr) return 0.0;
  std::uint64_t mass = 0;
  for (const auto& t : entry->transitions) {
    if (Token::from_text(t.next).stripped == word) mass += t.count;
  }
  return static_cast<double>(mass) / static_cast<double>(entry->total);
}

namespace {

CandidateScore score_candidate(std::span<const Substitution> substitutions, const Corpus& corpus,
                               const AttributionOptions& options) {
  CandidateScore out;
  out.label = corpus.label;
  std::optional<MarkovChain> chain;
  try {
    chain = train(corpus, ChainConfig{options.order, true});
    out.chain_trained = true;
  } catch (const Error&) {
    // Too little text to train on: every chain probability is zero.
  }
  const auto k = static_cast<std::size_t>(options.order);
  for (const auto& s : substitutions) {
    const auto& left = s.left_context;
    const std::size_t begin = left.size() > k ? left.size() - k : 0;
    const std::span<const std::string> ctx(left.data() + begin, left.size() - begin);

    SubstitutionEvidence ev;
    if (chain && !ctx.empty()) ev.chain_probability = backoff_word_probability(*chain, ctx, s.new_word);
    std::vector<std::string> phrase(ctx.begin(), ctx.end());
    phrase.push_back(s.new_word);
    ev.context_hits = context_search(phrase, corpus);

    out.log_likelihood += std::log(ev.chain_probability + options.epsilon);
    out.total_hits += ev.context_hits;
    out.evidence.push_back(ev);
  }
  out.score = out.log_likelihood + options.lambda * static_cast<double>(out.total_hits);
  return out;
}

}  // namespace

AttributionReport attribute_corpus(std::span<const Substitution> substitutions,
                                   std::span<const Corpus> candidates,
                                   const AttributionOptions& options) {
  if (substitutions.empty()) throw Error("attribute_corpus: no substitutions to attribute");
  if (candidates.empty()) throw Error("attribute_corpus: no candidate corpora");
  if (options.order < 1) throw Error("attribute_corpus: order must be at least 1");
  if (!(options.epsilon > 0.0)) throw Error("attribute_corpus: epsilon must be positive");

  AttributionReport report;
  report.options = options;
  if (options.parallel && candidates.size() > 1) {
    std::vector<std::future<CandidateScore>> jobs;
    for (const auto& c : candidates) {
      jobs.push_back(std::async(std::launch::async, score_candidate, substitutions, std::cref(c),
                                std::cref(options)));
    }
    for (auto& job : jobs) report.ranking.push_back(job.get());
  } else {
    for (const auto& c : candidates) report.ranking.push_back(score_candidate(substitutions, c, options));
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const CandidateScore& x, const CandidateScore& y) {
                     if (x.score != y.score) return x.score > y.score;
                     return x.label < y.label;
                   });
  return report;
}

// ---------------------------------------------------------------------------
// traces

std::size_t TraceAnomalyReport::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(sessions.begin(), sessions.end(), [](const TraceAnomaly& s) { return s.flagged; }));
}

std::set<std::string> TraceAnomalyReport::flagged_accounts() const {
  std::set<std::string> out;
  for (const auto& s : sessions) {
    if (s.flagged) out.insert(s.account);
  }
  return out;
}

TraceAnomalyReport analyze_traces(std::span<const SessionTrace> traces,
                                  const TraceThresholds& thresholds) {
  TraceAnomalyReport report;
  report.thresholds = thresholds;
  for (const auto& trace : traces) {
    const auto& events = trace.events;
    if (events.size() < 3) {
      report.warnings.push_back("session of '" + trace.account + "' has " +
                                std::to_string(events.size()) + " events; skipped");
      continue;
    }
    TraceAnomaly a;
    a.account = trace.account;
    a.event_count = events.size();

    std::vector<double> gaps;
    for (std::size_t i = 1; i < events.size(); ++i) {
      gaps.push_back(to_seconds(events[i].timestamp - events[i - 1].timestamp));
    }
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(gaps.size());
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    var /= static_cast<double>(gaps.size());
    a.interval_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;

    std::map<SessionEventKind, std::size_t> kinds;
    for (const auto& e : events) ++kinds[e.kind];
    for (const auto& [kind, count] : kinds) {
      const double p = static_cast<double>(count) / static_cast<double>(events.size());
      a.path_entropy -= p * std::log2(p);
    }

    bool viewed = false;
    for (const auto& e : events) {
      if (e.kind == SessionEventKind::view_page) viewed = true;
      if (e.kind == SessionEventKind::open_editor) {
        a.straight_to_target = !viewed;
        break;
      }
    }
    a.flagged = a.interval_cv < thresholds.interval_cv ||
                (a.straight_to_target && a.path_entropy < thresholds.path_entropy_bits);
    report.sessions.push_back(std::move(a));
  }
  return report;
}

// ---------------------------------------------------------------------------
// survival

SurvivalMetrics survival_metrics(std::span<const Revision> history,
                                 const std::set<std::uint64_t>& manipulated_ids) {
  std::vector<const Revision*> ordered;
  for (const auto& r : history) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const Revision* x, const Revision* y) { return x->revision_id < y->revision_id; });

  std::vector<TokenStream> streams;
  for (const auto* r : ordered) streams.push_back(tokenize(r->text));

  SurvivalMetrics metrics;
  for (const std::uint64_t id : manipulated_ids) {
    const auto it = std::find_if(ordered.begin(), ordered.end(),
                                 [id](const Revision* r) { return r->revision_id == id; });
    if (it == ordered.end()) throw NotFoundError("revision " + std::to_string(id) + " is not in the history");
    const auto pos = static_cast<std::size_t>(it - ordered.begin());
    const Revision& manipulated = **it;

    SurvivalRecord rec;
    rec.revision_id = id;
    std::vector<std::size_t> positions;
    if (pos > 0) {
      for (const auto& step : align_revisions(streams[pos - 1], streams[pos])) {
        if (step.op == AlignOp::substitute) positions.push_back(step.new_index);
      }
    }
    rec.substitutions = positions.size();

    if (!positions.empty()) {
      for (std::size_t later = pos + 1; later < ordered.size(); ++later) {
        std::vector<bool> kept(streams[pos].size(), false);
        for (const auto& step : align_revisions(streams[pos], streams[later])) {
          if (step.op == AlignOp::match) kept[step.old_index] = true;
        }
        const bool any_left =
            std::any_of(positions.begin(), positions.end(), [&kept](std::size_t p) { return kept[p]; });
        if (!any_left) {
          rec.corrected = true;
          rec.corrected_by = ordered[later]->revision_id;
          rec.intervening_edits = later - pos - 1;
          rec.survival_time = ordered[later]->timestamp - manipulated.timestamp;
          break;
        }
      }
    }
    if (!rec.corrected) {
      rec.intervening_edits = ordered.size() - pos - 1;
      rec.survival_time = ordered.back()->timestamp - manipulated.timestamp;
    }
    metrics.records.push_back(rec);
  }
  return metrics;
}

// ---------------------------------------------------------------------------
// reports

nlohmann::json to_json(const RevisionDiff& diff) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : diff.substitutions) {
    subs.push_back({{"token_index", s.token_index},
                    {"old_index", s.old_index},
                    {"old", s.old_word},
                    {"new", s.new_word},
                    {"left_context", s.left_context},
                    {"right_context", s.right_context}});
  }
  auto changes = [](const std::vector<WordChange>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : list) out.push_back({{"index", c.index}, {"word", c.word}});
    return out;
  };
  return {{"substitutions", std::move(subs)},
          {"insertions", changes(diff.insertions)},
          {"deletions", changes(diff.deletions)}};
}

nlohmann::json to_json(const AttributionReport& report) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& c : report.ranking) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : c.evidence) {
      evidence.push_back({{"context_hits", e.context_hits}, {"chain_probability", e.chain_probability}});
    }
    ranking.push_back({{"corpus_label", c.label},
                       {"score", c.score},
                       {"log_likelihood", c.log_likelihood},
                       {"context_hits", c.total_hits},
                       {"chain_trained", c.chain_trained},
                       {"evidence", std::move(evidence)}});
  }
  return {{"order", report.options.order},
          {"epsilon", report.options.epsilon},
          {"lambda", report.options.lambda},
          {"ranking", std::move(ranking)}};
}

nlohmann::json to_json(const TraceAnomalyReport& report) {
  nlohmann::json sessions = nlohmann::json::array();
  for (const auto& s : report.sessions) {
    sessions.push_back({{"account", s.account},
                        {"events", s.event_count},
                        {"interval_cv", s.interval_cv},
                        {"path_entropy", s.path_entropy},
                        {"straight_to_target", s.straight_to_target},
                        {"flagged", s.flagged}});
  }
  return {{"thresholds",
           {{"interval_cv", report.thresholds.interval_cv},
            {"path_entropy_bits", report.thresholds.path_entropy_bits}}},
          {"sessions", std::move(sessions)},
          {"warnings", report.warnings}};
}

nlohmann::json to_json(const SurvivalMetrics& metrics) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : metrics.records) {
    records.push_back({{"revision_id", r.revision_id},
                       {"substitutions", r.substitutions},
                       {"corrected", r.corrected},
                       {"corrected_by", r.corrected_by ? nlohmann::json(*r.corrected_by) : nlohmann::json(nullptr)},
                       {"intervening_edits", r.intervening_edits},
                       {"survival_time_us", r.survival_time.count()}});
  }
  return {{"records", std::move(records)}};
}

namespace {

std::string join_tokens(const Context& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::string format_table(const RevisionDiff& diff) {
  std::ostringstream out;
  out << "substitutions: " << diff.substitutions.size() << "  insertions: " << diff.insertions.size()
      << "  deletions: " << diff.deletions.size() << "\n";
  for (const auto& s : diff.substitutions) {
    out << "  #" << std::left << std::setw(6) << s.token_index << std::setw(16) << s.old_word << " -> "
        << std::setw(16) << s.new_word << " | " << join_tokens(s.left_context) << " [" << s.new_word << "] "
        << join_tokens(s.right_context) << "\n";
  }
  return out.str();
}

std::string format_table(const AttributionReport& report) {
  std::ostringstream out;
  out << "attribution (order " << report.options.order << ", epsilon " << report.options.epsilon
      << ", lambda " << report.options.lambda << ")\n";
  int rank = 1;
  for (const auto& c : report.ranking) {
    out << "  " << rank++ << ". " << std::left << std::setw(24) << c.label << " score " << std::setw(14)
        << c.score << " log-likelihood " << std::setw(14) << c.log_likelihood << " hits " << c.total_hits
        << "\n";
  }
  return out.str();
}

std::string format_table(const TraceAnomalyReport& report) {
  std::ostringstream out;
  out << "sessions: " << report.sessions.size() << "  flagged: " << report.flagged_count()
      << "  (cv < " << report.thresholds.interval_cv << ", or straight-to-target with entropy < "
      << report.thresholds.path_entropy_bits << " bits)\n";
  for (const auto& s : report.sessions) {
    out << "  " << std::left << std::setw(24) << s.account << " cv " << std::setw(10) << s.interval_cv
        << " entropy " << std::setw(10) << s.path_entropy << " straight " << (s.straight_to_target ? "yes" : "no ")
        << (s.flagged ? "  FLAGGED" : "") << "\n";
  }
  for (const auto& w : report.warnings) out << "  warning: " << w << "\n";
  return out.str();
}

std::string format_table(const SurvivalMetrics& metrics) {
  std::ostringstream out;
  for (const auto& r : metrics.records) {
    out << "revision " << r.revision_id << ": " << r.substitutions << " substitution(s), "
        << (r.corrected ? "corrected by revision " + std::to_string(*r.corrected_by) : std::string("not corrected"))
        << ", intervening edits " << r.intervening_edits << ", survival " << to_seconds(r.survival_time)
        << " s\n";
  }
  return out.str();
}

}  // namespace wikimim
