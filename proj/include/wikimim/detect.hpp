#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wikimim/chain.hpp"
#include "wikimim/corpus.hpp"
#include "wikimim/wikisim.hpp"

namespace wikimim {

// ---------------------------------------------------------------------------
// token alignment

enum class AlignOp { match, substitute, insert, remove };

struct AlignStep {
  AlignOp op = AlignOp::match;
  std::size_t old_index = 0;  // meaningless for insert
  std::size_t new_index = 0;  // meaningless for remove
};

// Alignment of two word sequences that maximizes the number of matched
// words (a longest common subsequence) and, among those, the number of
// words paired one-for-one inside the gaps between matches. Runs in
// O(n*m) time and O(n+m) memory.
std::vector<AlignStep> align_words(std::span<const std::string> old_words,
                                   std::span<const std::string> new_words);

// Token alignment of two revisions. When both have the same number of
// tokens and identical whitespace between them, tokens are paired by
// position; otherwise align_words runs on the stripped words.
std::vector<AlignStep> align_revisions(const TokenStream& old_stream, const TokenStream& new_stream);

// ---------------------------------------------------------------------------
// revision diff

struct Substitution {
  std::size_t token_index = 0;  // position in the new revision
  std::size_t old_index = 0;    // position in the old revision
  std::string old_word;         // stripped
  std::string new_word;         // stripped
  Context left_context;         // up to k preceding token texts (new revision)
  Context right_context;        // up to k following token texts (new revision)

  bool operator==(const Substitution&) const = default;
};

struct WordChange {
  std::size_t index = 0;  // new-revision index for insertions, old for deletions
  std::string word;

  bool operator==(const WordChange&) const = default;
};

struct RevisionDiff {
  std::vector<Substitution> substitutions;
  std::vector<WordChange> insertions;
  std::vector<WordChange> deletions;
};

// Aligns the revisions with align_revisions and reports one-for-one
// replacements separately from insertions and deletions.
RevisionDiff diff_revisions(std::string_view old_text, std::string_view new_text,
                            std::size_t context_size = 2);

// ---------------------------------------------------------------------------
// corpus attribution

// Occurrences of the stripped phrase as contiguous tokens within any single
// document. Throws Error for an empty phrase.
std::size_t context_search(std::span<const std::string> phrase, const Corpus& corpus);

struct SubstitutionEvidence {
  std::size_t context_hits = 0;
  double chain_probability = 0.0;
};

struct CandidateScore {
  std::string label;
  double score = 0.0;
  double log_likelihood = 0.0;    // sum of log(p + epsilon)
  std::size_t total_hits = 0;     // sum of context hits
  bool chain_trained = false;     // false when the corpus was too small
  std::vector<SubstitutionEvidence> evidence;
};

struct AttributionOptions {
  int order = 2;
  double epsilon = 1e-9;
  double lambda = 1.0;
  bool parallel = true;
};

struct AttributionReport {
  std::vector<CandidateScore> ranking;  // descending score, ties by label
  AttributionOptions options;
};

// Scores each candidate with a chain trained on it: per substitution, the
// backed-off chain probability of the new word after its left context and
// the number of corpus hits for (left context + new word);
// score = sum log(p + epsilon) + lambda * sum hits. Throws Error when
// either list is empty.
AttributionReport attribute_corpus(std::span<const Substitution> substitutions,
                                   std::span<const Corpus> candidates,
                                   const AttributionOptions& options = {});

// Probability mass the entry assigns to successors whose stripped form is
// `word`, after backing off to the longest seen suffix of `context`.
double backoff_word_probability(const MarkovChain& chain, std::span<const std::string> context,
                                std::string_view word);

// ---------------------------------------------------------------------------
// session trace analysis

struct TraceThresholds {
  double interval_cv = 0.05;
  double path_entropy_bits = 1.0;
};

struct TraceAnomaly {
  std::string account;
  std::size_t event_count = 0;
  double interval_cv = 0.0;   // stddev / mean of inter-event pauses
  double path_entropy = 0.0;  // Shannon entropy of event kinds, bits
  bool straight_to_target = false;
  bool flagged = false;
};

struct TraceAnomalyReport {
  std::vector<TraceAnomaly> sessions;
  std::vector<std::string> warnings;
  TraceThresholds thresholds;

  std::size_t flagged_count() const;
  std::set<std::string> flagged_accounts() const;
};

// Flags a session when interval_cv < thresholds.interval_cv, or when it went
// straight to the editor and path_entropy < thresholds.path_entropy_bits.
// Traces with fewer than three events are skipped with a warning.
TraceAnomalyReport analyze_traces(std::span<const SessionTrace> traces,
                                  const TraceThresholds& thresholds = {});

// ---------------------------------------------------------------------------
// edit survival

struct SurvivalRecord {
  std::uint64_t revision_id = 0;
  std::size_t substitutions = 0;  // found against the parent revision
  bool corrected = false;
  std::optional<std::uint64_t> corrected_by;
  std::size_t intervening_edits = 0;
  SimDuration survival_time{0};
};

struct SurvivalMetrics {
  std::vector<SurvivalRecord> records;  // ascending revision id
};

// For each manipulated revision, finds the first later revision in which
// none of the words it substituted remains aligned to its position.
// Uncorrected revisions report the time to the last revision. Throws
// NotFoundError for an id missing from `history`.
SurvivalMetrics survival_metrics(std::span<const Revision> history,
                                 const std::set<std::uint64_t>& manipulated_ids);

// ---------------------------------------------------------------------------
// reports

inline constexpr int kReportFormatVersion = 1;

nlohmann::json to_json(const RevisionDiff& diff);
nlohmann::json to_json(const AttributionReport& report);
nlohmann::json to_json(const TraceAnomalyReport& report);
nlohmann::json to_json(const SurvivalMetrics& metrics);

std::string format_table(const RevisionDiff& diff);
std::string format_table(const AttributionReport& report);
std::string format_table(const TraceAnomalyReport& report);
std::string format_table(const SurvivalMetrics& metrics);

}  // namespace wikimim
