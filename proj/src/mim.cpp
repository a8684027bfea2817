#include "wikimim/mim.hpp"

#include <json.hpp>

#include <sstream>
#include <unordered_set>

#include "wikimim/error.hpp"
#include "wikimim/hash.hpp"
#include "wikimim/unicode.hpp"

namespace wikimim {

namespace {

class TargetMatcher {
 public:
  explicit TargetMatcher(const TargetStrategy& strategy) : strategy_(strategy) {
    for (const auto& t : strategy.targets) {
      words_.insert(strategy.case_sensitive ? t : unicode::case_fold(t));
    }
  }

  bool operator()(const Token& token) const {
    const std::string& word = strategy_.match_on_stripped ? token.stripped : token.text;
    if (word.empty()) return false;
    return words_.contains(strategy_.case_sensitive ? word : unicode::case_fold(word));
  }

 private:
  const TargetStrategy& strategy_;
  std::unordered_set<std::string> words_;
};

void validate_strategy(const TargetStrategy& strategy) {
  if (strategy.targets.empty()) throw Error("target strategy has no target words");
  for (const auto& t : strategy.targets) {
    if (t.empty()) throw Error("target strategy contains an empty word");
    for (std::size_t pos = 0; pos < t.size();) {
      if (unicode::is_space(unicode::next_code_point(t, pos))) {
        throw Error("target '" + t + "' contains whitespace");
      }
    }
  }
}

// Checks the object against `stream` and returns the rewritten token texts.
std::vector<std::string> rewritten_tokens(const MimObject& mim, std::string_view text,
                                          const TokenStream& stream) {
  if (sha256_hex(text) != mim.base_text_hash) throw StaleMimError("text digest does not match");
  std::vector<std::string> out = token_texts(stream);
  std::size_t previous = 0;
  bool first = true;
  for (const auto& edit : mim.edits) {
    if (!first && edit.token_index <= previous) {
      throw Error("MIM object edits are not strictly increasing at token " +
                  std::to_string(edit.token_index));
    }
    first = false;
    previous = edit.token_index;
    if (edit.token_index >= stream.size()) {
      throw Error("edit token index " + std::to_string(edit.token_index) + " out of range (" +
                  std::to_string(stream.size()) + " tokens)");
    }
    const Token& source = stream.tokens[edit.token_index];
    if (source.text != edit.original) {
      throw StaleMimError("token " + std::to_string(edit.token_index) + " is '" + source.text +
                          "', expected '" + edit.original + "'");
    }
    const Token repl = Token::from_text(edit.replacement);
    if (repl.stripped.empty()) {
      throw Error("replacement '" + edit.replacement + "' has no word content");
    }
    for (std::size_t pos = 0; pos < repl.text.size();) {
      if (unicode::is_space(unicode::next_code_point(repl.text, pos))) {
        throw Error("replacement '" + edit.replacement + "' contains whitespace");
      }
    }
    out[edit.token_index] = source.lead_punct + repl.stripped + source.trail_punct;
  }
  return out;
}

std::string context_window(const std::vector<std::string>& tokens, std::size_t index,
                           std::size_t radius) {
  const std::size_t begin = index > radius ? index - radius : 0;
  const std::size_t end = std::min(tokens.size(), index + radius + 1);
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back(' ');
    if (i == index) {
      out += "[" + tokens[i] + "]";
    } else {
      out += tokens[i];
    }
  }
  return out;
}

}  // namespace

bool match_target(const Token& token, const TargetStrategy& strategy) {
  return TargetMatcher(strategy)(token);
}

MimObject build_mim_object(const MarkovChain& chain, std::string_view article_id,
                           std::string_view text, const TargetStrategy& strategy,
                           std::uint64_t seed, const MimOptions& options) {
  validate_strategy(strategy);
  if (text.empty()) throw Error("cannot build a MIM object for empty text");

  MimObject mim;
  mim.article_id = std::string(article_id);
  mim.base_text_hash = sha256_hex(text);
  mim.seed = seed;
  mim.strategy = strategy;
  mim.chain_label = chain.label();

  const TargetMatcher matches(strategy);
  const TokenStream stream = tokenize(text);
  std::vector<std::string> current = token_texts(stream);
  Rng rng(seed);
  const auto order = static_cast<std::size_t>(chain.order());

  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Token& token = stream.tokens[i];
    if (!matches(token)) continue;
    const std::size_t begin = i > order ? i - order : 0;
    const std::span<const std::string> left(current.data() + begin, i - begin);
    if (left.empty()) {
      mim.skipped.push_back({i, token.text, "no preceding context"});
      continue;
    }

    std::optional<BackoffDraw> draw = sample_from_suffix(chain, left, rng);
    if (!draw) {
      mim.skipped.push_back({i, token.text, "context unseen at every order"});
      continue;
    }
    std::string core = Token::from_text(draw->next).stripped;
    if (options.resample_identical) {
      for (int attempt = 0; attempt < options.max_resample_attempts && core == token.stripped; ++attempt) {
        draw = sample_from_suffix(chain, left, rng);
        core = Token::from_text(draw->next).stripped;
      }
    }
    if (core.empty()) {
      mim.skipped.push_back({i, token.text, "successor '" + draw->next + "' has no word content"});
      continue;
    }
    current[i] = token.lead_punct + core + token.trail_punct;
    mim.edits.push_back({i, token.text, draw->next, draw->context_used, draw->used_order});
  }
  return mim;
}

std::string apply(const MimObject& mim, std::string_view text) {
  TokenStream stream = tokenize(text);
  std::vector<std::string> rewritten = rewritten_tokens(mim, text, stream);
  for (const auto& edit : mim.edits) {
    stream.tokens[edit.token_index] = Token::from_text(std::move(rewritten[edit.token_index]));
  }
  return detokenize(stream);
}

std::string preview(const MimObject& mim, std::string_view text) {
  const TokenStream stream = tokenize(text);
  const std::vector<std::string> after = rewritten_tokens(mim, text, stream);
  const std::vector<std::string> before = token_texts(stream);

  std::ostringstream out;
  out << "MIM object for '" << mim.article_id << "' (chain '" << mim.chain_label << "', seed "
      << mim.seed << ")\n";
  if (mim.edits.empty()) {
    out << "no edits\n";
  } else {
    out << mim.edits.size() << (mim.edits.size() == 1 ? " edit\n" : " edits\n");
    for (const auto& edit : mim.edits) {
      out << "  #" << edit.token_index << " (order " << edit.backoff_order << ")\n"
          << "    - " << context_window(before, edit.token_index, 5) << "\n"
          << "    + " << context_window(after, edit.token_index, 5) << "\n";
    }
  }
  for (const auto& skip : mim.skipped) {
    out << "  skipped #" << skip.token_index << " '" << skip.original << "': " << skip.reason << "\n";
  }
  return out.str();
}

std::string mim_to_json(const MimObject& mim) {
  nlohmann::json edits = nlohmann::json::array();
  for (const auto& e : mim.edits) {
    edits.push_back({{"token_index", e.token_index},
                     {"original", e.original},
                     {"replacement", e.replacement},
                     {"context_used", e.context_used},
                     {"backoff_order", e.backoff_order}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : mim.skipped) {
    skipped.push_back({{"token_index", s.token_index}, {"original", s.original}, {"reason", s.reason}});
  }
  nlohmann::json doc = {
      {"format_version", kMimFormatVersion},
      {"article_id", mim.article_id},
      {"base_text_hash", mim.base_text_hash},
      {"seed", mim.seed},
      {"chain_label", mim.chain_label},
      {"strategy",
       {{"targets", mim.strategy.targets},
        {"case_sensitive", mim.strategy.case_sensitive},
        {"match_on_stripped", mim.strategy.match_on_stripped}}},
      {"edits", std::move(edits)},
      {"skipped", std::move(skipped)},
  };
  return doc.dump(2) + "\n";
}

MimObject mim_from_json(std::string_view bytes) {
  nlohmann::json doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) throw FormatError("MIM object: payload is not valid JSON");
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kMimFormatVersion) {
      throw FormatError("MIM object: unsupported format_version " + std::to_string(version));
    }
    MimObject mim;
    mim.article_id = doc.at("article_id").get<std::string>();
    mim.base_text_hash = doc.at("base_text_hash").get<std::string>();
    mim.seed = doc.at("seed").get<std::uint64_t>();
    mim.chain_label = doc.at("chain_label").get<std::string>();
    const auto& strategy = doc.at("strategy");
    mim.strategy.targets = strategy.at("targets").get<std::set<std::string>>();
    mim.strategy.case_sensitive = strategy.at("case_sensitive").get<bool>();
    mim.strategy.match_on_stripped = strategy.at("match_on_stripped").get<bool>();
    for (const auto& e : doc.at("edits")) {
      Edit edit;
      edit.token_index = e.at("token_index").get<std::size_t>();
      edit.original = e.at("original").get<std::string>();
      edit.replacement = e.at("replacement").get<std::string>();
      edit.context_used = e.at("context_used").get<Context>();
      edit.backoff_order = e.at("backoff_order").get<int>();
      if (!mim.edits.empty() && edit.token_index <= mim.edits.back().token_index) {
        throw FormatError("MIM object: edits are not strictly increasing");
      }
      mim.edits.push_back(std::move(edit));
    }
    if (const auto it = doc.find("skipped"); it != doc.end()) {
      for (const auto& s : *it) {
        mim.skipped.push_back({s.at("token_index").get<std::size_t>(), s.at("original").get<std::string>(),
                               s.at("reason").get<std::string>()});
      }
    }
    return mim;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("MIM object: ") + e.what());
  }
}

}  // namespace wikimim
