#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wikimim/chain.hpp"
#include "wikimim/corpus.hpp"

namespace wikimim {

// The adversary's word list. Matching compares whole words, never
// substrings.
struct TargetStrategy {
  std::set<std::string> targets;
  bool case_sensitive = false;
  // Compare the token with its edge punctuation removed ("Uyghurs," matches
  // "Uyghurs").
  bool match_on_stripped = true;

  bool operator==(const TargetStrategy&) const = default;
};

bool match_target(const Token& token, const TargetStrategy& strategy);

struct Edit {
  std::size_t token_index = 0;
  std::string original;     // token text in the source revision
  std::string replacement;  // successor token as stored in the chain
  Context context_used;     // context the successor was drawn from
  int backoff_order = 0;    // == context_used.size()

  bool operator==(const Edit&) const = default;
};

// A target occurrence the engine left in place.
struct SkippedTarget {
  std::size_t token_index = 0;
  std::string original;
  std::string reason;

  bool operator==(const SkippedTarget&) const = default;
};

struct MimObject {
  std::string article_id;
  std::string base_text_hash;  // SHA-256 hex of the source text
  std::vector<Edit> edits;     // strictly increasing token_index
  std::uint64_t seed = 0;
  TargetStrategy strategy;
  std::string chain_label;
  std::vector<SkippedTarget> skipped;

  bool operator==(const MimObject&) const = default;
};

struct MimOptions {
  // Redraw (up to max_resample_attempts times) when the successor's word
  // equals the word it replaces. Off by default so draws follow the chain's
  // probabilities exactly.
  bool resample_identical = false;
  int max_resample_attempts = 10;
};

// Scans `text` left to right and, for every target occurrence, draws a
// successor from the chain conditioned on the preceding tokens as already
// rewritten. Occurrences with no usable context are recorded in `skipped`.
// Throws Error on an empty strategy, a malformed target or empty text.
MimObject build_mim_object(const MarkovChain& chain, std::string_view article_id,
                           std::string_view text, const TargetStrategy& strategy,
                           std::uint64_t seed, const MimOptions& options = {});

// Rewrites each edited token as original lead punctuation + successor word +
// original trailing punctuation; everything else is copied byte for byte.
// Throws StaleMimError when `text` is not the revision the object was built
// from, Error for an out-of-range index.
std::string apply(const MimObject& mim, std::string_view text);

// Human-readable listing of each edit with five tokens of context on either
// side. Same errors as apply().
std::string preview(const MimObject& mim, std::string_view text);

inline constexpr int kMimFormatVersion = 1;

std::string mim_to_json(const MimObject& mim);
// Throws FormatError.
MimObject mim_from_json(std::string_view bytes);

}  // namespace wikimim
