#include "wikimim/fetch.hpp"

#include <httplib.h>
#include <json.hpp>

#include <set>
#include <thread>

#include "wikimim/error.hpp"

namespace wikimim {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint parse_endpoint(std::string_view url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error("fetch_articles: endpoint '" + std::string(url) + "' has no scheme");
  }
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "https" && scheme != "http") {
    throw Error("fetch_articles: unsupported scheme '" + std::string(scheme) + "'");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = std::string(url.substr(0, path_start));
  ep.path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));
  if (ep.origin.size() <= scheme_end + 3) {
    throw Error("fetch_articles: endpoint '" + std::string(url) + "' has no host");
  }
  if (ep.path.find('?') != std::string::npos) {
    throw Error("fetch_articles: endpoint must not carry a query string");
  }
  return ep;
}

}  // namespace

std::string extracts_query(std::string_view title) {
  return "action=query&prop=extracts&explaintext=1&format=json&formatversion=2"
         "&redirects=1&titles=" +
         url_encode(title);
}

FetchResult fetch_articles(std::span<const std::string> titles, std::string_view endpoint,
                           std::string label, const FetchOptions& options) {
  if (titles.empty()) throw Error("fetch_articles: no titles requested");
  if (options.rate_limit < std::chrono::seconds(1)) {
    throw Error("fetch_articles: rate limit must be at least 1 second");
  }
  const Endpoint ep = parse_endpoint(endpoint);
  const auto sleep = options.sleep ? options.sleep : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  httplib::Client client(ep.origin);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  client.set_follow_location(false);
  const httplib::Headers headers = {{"User-Agent", options.user_agent},
                                    {"Accept", "application/json"}};

  FetchResult result;
  result.corpus.label = std::move(label);
  std::set<std::string> requested;
  bool first = true;
  for (const auto& title : titles) {
    if (!requested.insert(title).second) continue;  // one request per distinct title
    if (!first) sleep(options.rate_limit);
    first = false;

    const std::string target = ep.path + "?" + extracts_query(title);
    auto res = client.Get(target, headers);
    if (!res) {
      result.failures.push_back({title, "request failed: " + httplib::to_string(res.error())});
      continue;
    }
    if (res->status != 200) {
      result.failures.push_back({title, "HTTP " + std::to_string(res->status)});
      continue;
    }
    nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded()) {
      result.failures.push_back({title, "response is not JSON"});
      continue;
    }
    const auto pages_it = body.find("query");
    if (pages_it == body.end() || !pages_it->contains("pages")) {
      result.failures.push_back({title, "response has no query.pages"});
      continue;
    }
    const nlohmann::json& pages = (*pages_it)["pages"];
    // formatversion=2 gives an array; older servers give an object keyed by
    // page id.
    const nlohmann::json* page = nullptr;
    if (pages.is_array() && !pages.empty()) {
      page = &pages.front();
    } else if (pages.is_object() && !pages.empty()) {
      page = &pages.begin().value();
    }
    if (page == nullptr) {
      result.failures.push_back({title, "response has an empty page list"});
      continue;
    }
    if (page->contains("missing") || page->contains("invalid")) {
      result.missing.push_back(title);
      continue;
    }
    const auto extract = page->find("extract");
    if (extract == page->end() || !extract->is_string()) {
      result.failures.push_back({title, "page has no plain-text extract"});
      continue;
    }
    result.corpus.documents.push_back(
        {title, extract->get<std::string>(), DocumentSource::remote_fetch});
  }
  return result;
}

}  // namespace wikimim
