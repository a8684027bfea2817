#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikimim/corpus.hpp"
#include "wikimim/rng.hpp"

namespace wikimim {

// The k preceding token texts, oldest first.
using Context = std::vector<std::string>;

struct ChainConfig {
  int order = 2;
  // When set, no context or transition spans two documents.
  bool document_boundaries = true;
};

struct Transition {
  std::string next;
  std::uint64_t count = 0;
  double probability = 0.0;  // count / total count of the context

  bool operator==(const Transition&) const = default;
};

// Order-k Markov chain over whitespace tokens. Besides the order-k table it
// keeps the tables for every lower order, which backoff draws from. Counts
// are authoritative; probabilities are derived from them on construction.
class MarkovChain {
 public:
  struct Entry {
    Context context;
    std::vector<Transition> transitions;  // sorted by `next`, byte order
    std::uint64_t total = 0;

    bool operator==(const Entry&) const = default;
  };
  // Keyed by the context tokens joined with a single space (tokens carry no
  // whitespace, so the key is unambiguous).
  using Table = std::map<std::string, Entry>;
  // Successor counts per context, one map per order 1..k.
  using Counts = std::vector<std::map<Context, std::map<std::string, std::uint64_t>>>;

  // Validates and freezes a chain. Throws Error when the order is < 1, the
  // order-k table is empty, a count is zero, a context has the wrong length,
  // or a token is empty or contains whitespace.
  static MarkovChain from_counts(int order, std::string label, std::size_t vocab_size,
                                 const Counts& counts);

  int order() const { return order_; }
  const std::string& label() const { return label_; }
  std::size_t vocab_size() const { return vocab_size_; }

  // Table for contexts of length `level` (1..order).
  const Table& table(int level) const;

  // Stored entry for a context of length 1..order, or nullptr when unseen.
  const Entry* find(std::span<const std::string> context) const;

  // Number of (context, successor) pairs at full order.
  std::size_t transition_count() const;

  bool operator==(const MarkovChain&) const = default;

 private:
  MarkovChain() = default;

  int order_ = 0;
  std::string label_;
  std::size_t vocab_size_ = 0;
  std::vector<Table> tables_;  // tables_[level - 1]
};

// Maximum-likelihood chain over the corpus token streams. Throws Error
// ("insufficient tokens") when no document holds order + 1 tokens.
MarkovChain train(const Corpus& corpus, const ChainConfig& config);

// Stored transitions for a context whose length equals the chain order;
// empty when the context was never seen. Throws Error on a length mismatch.
std::vector<Transition> next_distribution(const MarkovChain& chain,
                                          std::span<const std::string> context);

// Weighted draw for a full-order context; nullopt when the context is
// unseen. Throws Error on a length mismatch.
std::optional<std::string> sample(const MarkovChain& chain, std::span<const std::string> context,
                                  Rng& rng);

struct BackoffDraw {
  std::string next;
  int used_order = 0;
  Context context_used;

  bool operator==(const BackoffDraw&) const = default;
};

// Draws from the full context, dropping the oldest token while the context
// is unseen. Throws Error on a length mismatch.
std::optional<BackoffDraw> sample_with_backoff(const MarkovChain& chain,
                                               std::span<const std::string> context, Rng& rng);

// Same as sample_with_backoff but accepts any context of length 1..order
// (the last `order` tokens are used when longer). Empty context yields
// nullopt.
std::optional<BackoffDraw> sample_from_suffix(const MarkovChain& chain,
                                              std::span<const std::string> context, Rng& rng);

// Longest stored suffix of `context` (at most `order` tokens), or nullptr.
const MarkovChain::Entry* find_with_backoff(const MarkovChain& chain,
                                            std::span<const std::string> context);

inline constexpr int kChainFormatVersion = 1;

// Versioned JSON document: {format_version, order, label, vocab_size,
// contexts: [{ctx: [...], transitions: [{next, count}]}]}. Contexts of every
// order are listed, shortest first, in key order.
std::string serialize(const MarkovChain& chain);

// Throws FormatError on malformed input or a version mismatch.
MarkovChain deserialize(std::string_view bytes);

}  // namespace wikimim
