#include "wikimim/chain.hpp"

#include <json.hpp>

#include <set>

#include "wikimim/error.hpp"
#include "wikimim/unicode.hpp"

namespace wikimim {

namespace {

std::string join_key(std::span<const std::string> context) {
  std::string key;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i > 0) key.push_back(' ');
    key += context[i];
  }
  return key;
}

bool valid_token(const std::string& token) {
  if (token.empty()) return false;
  for (std::size_t pos = 0; pos < token.size();) {
    if (unicode::is_space(unicode::next_code_point(token, pos))) return false;
  }
  return true;
}

void require_full_order(const MarkovChain& chain, std::span<const std::string> context) {
  if (static_cast<int>(context.size()) != chain.order()) {
    throw Error("context has " + std::to_string(context.size()) + " tokens, chain order is " +
                std::to_string(chain.order()));
  }
}

const Transition& draw(const MarkovChain::Entry& entry, Rng& rng) {
  std::uint64_t r = rng.uniform_int(entry.total);
  for (const auto& t : entry.transitions) {
    if (r < t.count) return t;
    r -= t.count;
  }
  return entry.transitions.back();  // unreachable: counts sum to total
}

}  // namespace

MarkovChain MarkovChain::from_counts(int order, std::string label, std::size_t vocab_size,
                                     const Counts& counts) {
  if (order < 1) throw Error("chain order must be at least 1, got " + std::to_string(order));
  if (counts.size() != static_cast<std::size_t>(order)) {
    throw Error("expected count tables for orders 1.." + std::to_string(order));
  }
  MarkovChain chain;
  chain.order_ = order;
  chain.label_ = std::move(label);
  chain.vocab_size_ = vocab_size;
  chain.tables_.resize(static_cast<std::size_t>(order));
  for (int level = 1; level <= order; ++level) {
    Table& table = chain.tables_[static_cast<std::size_t>(level - 1)];
    for (const auto& [context, successors] : counts[static_cast<std::size_t>(level - 1)]) {
      if (static_cast<int>(context.size()) != level) {
        throw Error("context of length " + std::to_string(context.size()) +
                    " stored at order " + std::to_string(level));
      }
      for (const auto& token : context) {
        if (!valid_token(token)) throw Error("invalid context token '" + token + "'");
      }
      if (successors.empty()) throw Error("context '" + join_key(context) + "' has no successors");
      Entry entry;
      entry.context = context;
      for (const auto& [next, count] : successors) {
        if (!valid_token(next)) throw Error("invalid successor token '" + next + "'");
        if (count == 0) throw Error("zero count for '" + join_key(context) + "' -> '" + next + "'");
        entry.total += count;
        entry.transitions.push_back({next, count, 0.0});
      }
      for (auto& t : entry.transitions) {
        t.probability = static_cast<double>(t.count) / static_cast<double>(entry.total);
      }
      table.emplace(join_key(context), std::move(entry));
    }
  }
  if (chain.tables_.back().empty()) throw Error("chain has no transitions at order " + std::to_string(order));
  return chain;
}

const MarkovChain::Table& MarkovChain::table(int level) const {
  if (level < 1 || level > order_) throw Error("no table for order " + std::to_string(level));
  return tables_[static_cast<std::size_t>(level - 1)];
}

const MarkovChain::Entry* MarkovChain::find(std::span<const std::string> context) const {
  if (context.empty() || static_cast<int>(context.size()) > order_) return nullptr;
  const Table& t = tables_[context.size() - 1];
  const auto it = t.find(join_key(context));
  return it == t.end() ? nullptr : &it->second;
}

std::size_t MarkovChain::transition_count() const {
  std::size_t n = 0;
  for (const auto& [key, entry] : tables_.back()) n += entry.transitions.size();
  return n;
}

MarkovChain train(const Corpus& corpus, const ChainConfig& config) {
  if (config.order < 1) throw Error("chain order must be at least 1, got " + std::to_string(config.order));
  const auto k = static_cast<std::size_t>(config.order);

  std::vector<std::vector<std::string>> sequences;
  for (const auto& doc : corpus.documents) {
    auto tokens = token_texts(tokenize(doc.raw_text));
    if (config.document_boundaries || sequences.empty()) {
      sequences.push_back(std::move(tokens));
    } else {
      sequences.back().insert(sequences.back().end(), std::make_move_iterator(tokens.begin()),
                              std::make_move_iterator(tokens.end()));
    }
  }

  bool trainable = false;
  std::set<std::string> vocab;
  MarkovChain::Counts counts(k);
  for (const auto& seq : sequences) {
    vocab.insert(seq.begin(), seq.end());
    if (seq.size() < k + 1) continue;
    trainable = true;
  }
  if (!trainable) {
    throw Error("insufficient tokens: corpus '" + corpus.label + "' has no document with " +
                std::to_string(k + 1) + " or more tokens");
  }
  for (const auto& seq : sequences) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      for (std::size_t level = 1; level <= k && level <= i; ++level) {
        Context ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - level),
                    seq.begin() + static_cast<std::ptrdiff_t>(i));
        ++counts[level - 1][std::move(ctx)][seq[i]];
      }
    }
  }
  return MarkovChain::from_counts(config.order, corpus.label, vocab.size(), counts);
}

std::vector<Transition> next_distribution(const MarkovChain& chain,
                                          std::span<const std::string> context) {
  require_full_order(chain, context);
  const auto* entry = chain.find(context);
  if (entry == nullptr) return {};
  return entry->transitions;
}

std::optional<std::string> sample(const MarkovChain& chain, std::span<const std::string> context,
                                  Rng& rng) {
  require_full_order(chain, context);
  const auto* entry = chain.find(context);
  if (entry == nullptr) return std::nullopt;
  return draw(*entry, rng).next;
}

const MarkovChain::Entry* find_with_backoff(const MarkovChain& chain,
                                            std::span<const std::string> context) {
  if (static_cast<int>(context.size()) > chain.order()) {
    context = context.subspan(context.size() - static_cast<std::size_t>(chain.order()));
  }
  while (!context.empty()) {
    if (const auto* entry = chain.find(context)) return entry;
    context = context.subspan(1);
  }
  return nullptr;
}

std::optional<BackoffDraw> sample_from_suffix(const MarkovChain& chain,
                                              std::span<const std::string> context, Rng& rng) {
  const auto* entry = find_with_backoff(chain, context);
  if (entry == nullptr) return std::nullopt;
  return BackoffDraw{draw(*entry, rng).next, static_cast<int>(entry->context.size()), entry->context};
}

std::optional<BackoffDraw> sample_with_backoff(const MarkovChain& chain,
                                               std::span<const std::string> context, Rng& rng) {
  require_full_order(chain, context);
  return sample_from_suffix(chain, context, rng);
}

std::string serialize(const MarkovChain& chain) {
  nlohmann::json contexts = nlohmann::json::array();
  for (int level = 1; level <= chain.order(); ++level) {
    for (const auto& [key, entry] : chain.table(level)) {
      nlohmann::json transitions = nlohmann::json::array();
      for (const auto& t : entry.transitions) {
        transitions.push_back({{"next", t.next}, {"count", t.count}});
      }
      contexts.push_back({{"ctx", entry.context}, {"transitions", std::move(transitions)}});
    }
  }
  nlohmann::json doc = {{"format_version", kChainFormatVersion},
                        {"order", chain.order()},
                        {"label", chain.label()},
                        {"vocab_size", chain.vocab_size()},
                        {"contexts", std::move(contexts)}};
  return doc.dump() + "\n";
}

MarkovChain deserialize(std::string_view bytes) {
  nlohmann::json doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) throw FormatError("chain file: payload is not valid JSON (truncated?)");
  try {
    if (!doc.is_object()) throw FormatError("chain file: top level must be an object");
    const int version = doc.at("format_version").get<int>();
    if (version != kChainFormatVersion) {
      throw FormatError("chain file: unsupported format_version " + std::to_string(version) +
                        " (expected " + std::to_string(kChainFormatVersion) + ")");
    }
    const int order = doc.at("order").get<int>();
    if (order < 1) throw FormatError("chain file: order must be at least 1, got " + std::to_string(order));
    auto label = doc.at("label").get<std::string>();
    const auto vocab_size = doc.at("vocab_size").get<std::size_t>();
    MarkovChain::Counts counts(static_cast<std::size_t>(order));
    for (const auto& item : doc.at("contexts")) {
      auto ctx = item.at("ctx").get<Context>();
      if (ctx.empty() || static_cast<int>(ctx.size()) > order) {
        throw FormatError("chain file: context length " + std::to_string(ctx.size()) +
                          " outside 1.." + std::to_string(order));
      }
      auto& successors = counts[ctx.size() - 1][ctx];
      if (!successors.empty()) throw FormatError("chain file: duplicate context '" + ctx.front() + "...'");
      for (const auto& t : item.at("transitions")) {
        const auto next = t.at("next").get<std::string>();
        if (!t.at("count").is_number_unsigned()) {
          throw FormatError("chain file: count for '" + next + "' must be a nonnegative integer");
        }
        const auto count = t.at("count").get<std::uint64_t>();
        if (!successors.emplace(next, count).second) {
          throw FormatError("chain file: duplicate successor '" + next + "'");
        }
      }
    }
    return MarkovChain::from_counts(order, std::move(label), vocab_size, counts);
  } catch (const FormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("chain file: ") + e.what());
  } catch (const Error& e) {
    throw FormatError(std::string("chain file: ") + e.what());
  }
}

}  // namespace wikimim
