#pragma once

#include <chrono>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikimim/corpus.hpp"

namespace wikimim {

struct FetchOptions {
  // Minimum spacing between consecutive requests; must be at least 1 s.
  std::chrono::milliseconds rate_limit{1000};
  std::string user_agent = "wikimim-corpus-fetcher/1.0 (offline research sandbox; read-only)";
  std::chrono::seconds timeout{30};
  // Used to wait between requests. Defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct FetchFailure {
  std::string title;
  std::string reason;
};

struct FetchResult {
  Corpus corpus;                       // documents that were fetched
  std::vector<FetchFailure> failures;  // transport, HTTP or decoding errors
  std::vector<std::string> missing;    // titles the wiki reported as absent
};

// Read-only plain-text retrieval through the MediaWiki Action API
// (action=query, prop=extracts, explaintext=1). Issues one GET per title,
// sequentially, never authenticates. Per-title errors are collected in the
// result; throws Error only for an empty title list, a malformed endpoint or
// a rate limit below one second.
FetchResult fetch_articles(std::span<const std::string> titles, std::string_view endpoint,
                           std::string label, const FetchOptions& options = {});

// Query string sent for `title` (exposed for tests).
std::string extracts_query(std::string_view title);

}  // namespace wikimim
