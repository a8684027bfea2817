#include "wikimim/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_map>

#include "wikimim/error.hpp"
#include "wikimim/unicode.hpp"

namespace wikimim {

Token Token::from_text(std::string text) {
  // Code point start offsets, plus the end offset.
  std::vector<std::size_t> starts;
  std::vector<bool> punct;
  for (std::size_t pos = 0; pos < text.size();) {
    starts.push_back(pos);
    punct.push_back(unicode::is_edge_punct(unicode::next_code_point(text, pos)));
  }
  starts.push_back(text.size());

  const std::size_t n = punct.size();
  std::size_t first = 0;
  while (first < n && punct[first]) ++first;
  std::size_t last = n;
  while (last > first && punct[last - 1]) --last;

  Token token;
  const std::size_t core_begin = starts[first];
  const std::size_t core_end = starts[last];
  token.lead_punct = text.substr(0, core_begin);
  token.stripped = text.substr(core_begin, core_end - core_begin);
  token.trail_punct = text.substr(core_end);
  token.text = std::move(text);
  return token;
}

TokenStream tokenize(std::string_view text) {
  TokenStream stream;
  std::size_t pos = 0;
  std::size_t run_start = 0;
  bool in_token = false;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const bool space = unicode::is_space(unicode::next_code_point(text, pos));
    if (space && in_token) {
      stream.tokens.push_back(Token::from_text(std::string(text.substr(run_start, start - run_start))));
      run_start = start;
      in_token = false;
    } else if (!space && !in_token) {
      stream.separators.emplace_back(text.substr(run_start, start - run_start));
      run_start = start;
      in_token = true;
    }
  }
  if (in_token) {
    stream.tokens.push_back(Token::from_text(std::string(text.substr(run_start))));
    stream.separators.emplace_back();
  } else {
    stream.separators.emplace_back(text.substr(run_start));
  }
  return stream;
}

std::string detokenize(const TokenStream& stream) {
  if (stream.separators.size() != stream.tokens.size() + 1) {
    throw Error("detokenize: malformed stream (" + std::to_string(stream.tokens.size()) +
                " tokens, " + std::to_string(stream.separators.size()) + " separators)");
  }
  std::string out = stream.separators.front();
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    out += stream.tokens[i].text;
    out += stream.separators[i + 1];
  }
  return out;
}

std::vector<std::string> token_texts(const TokenStream& stream) {
  std::vector<std::string> out;
  out.reserve(stream.size());
  for (const auto& t : stream.tokens) out.push_back(t.text);
  return out;
}

std::vector<std::string> stripped_words(const TokenStream& stream) {
  std::vector<std::string> out;
  out.reserve(stream.size());
  for (const auto& t : stream.tokens) out.push_back(t.stripped);
  return out;
}

// ---------------------------------------------------------------------------
// wikitext stripping

namespace {

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::size_t find_ci(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (starts_with_ci(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

std::string remove_comments(std::string_view s, std::set<std::string>& warnings) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t open = s.find("<!--", i);
    if (open == std::string_view::npos) break;
    const std::size_t close = s.find("-->", open + 4);
    if (close == std::string_view::npos) {
      warnings.insert("unterminated HTML comment");
      break;
    }
    out.append(s.substr(i, open - i));
    i = close + 3;
  }
  out.append(s.substr(i));
  return out;
}

// <ref ...>...</ref> and <ref ... />
std::string remove_refs(std::string_view s, std::set<std::string>& warnings) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t open = find_ci(s, "<ref", i);
    // "<references/>" and similar are not ref tags.
    while (open != std::string_view::npos && open + 4 < s.size() &&
           !(s[open + 4] == '>' || s[open + 4] == ' ' || s[open + 4] == '/' ||
             s[open + 4] == '\t' || s[open + 4] == '\n')) {
      open = find_ci(s, "<ref", open + 4);
    }
    if (open == std::string_view::npos) break;
    const std::size_t tag_end = s.find('>', open);
    if (tag_end == std::string_view::npos) {
      warnings.insert("unterminated <ref> tag");
      break;
    }
    if (s[tag_end - 1] == '/') {
      out.append(s.substr(i, open - i));
      i = tag_end + 1;
      continue;
    }
    const std::size_t close = find_ci(s, "</ref>", tag_end + 1);
    if (close == std::string_view::npos) {
      warnings.insert("unclosed <ref> element");
      out.append(s.substr(i, tag_end + 1 - i));
      i = tag_end + 1;
      continue;
    }
    out.append(s.substr(i, open - i));
    i = close + 6;
  }
  out.append(s.substr(i));
  return out;
}

std::string remove_templates(std::string_view s, std::set<std::string>& warnings) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "{{") != 0) {
      out.push_back(s[i++]);
      continue;
    }
    int depth = 0;
    std::size_t j = i;
    std::size_t end = std::string_view::npos;
    while (j + 1 < s.size()) {
      if (s.compare(j, 2, "{{") == 0) {
        ++depth;
        j += 2;
      } else if (s.compare(j, 2, "}}") == 0) {
        --depth;
        j += 2;
        if (depth == 0) {
          end = j;
          break;
        }
      } else {
        ++j;
      }
    }
    if (end == std::string_view::npos) {
      warnings.insert("unterminated template");
      out.append("{{");
      i += 2;
    } else {
      i = end;
    }
  }
  return out;
}

// Rewrites the innermost [[...]] links; nesting resolves over repeated passes.
std::string replace_links(std::string_view s, std::set<std::string>& warnings) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 2, "[[") != 0) {
      out.push_back(s[i++]);
      continue;
    }
    const std::size_t close = s.find("]]", i + 2);
    const std::size_t nested = s.find("[[", i + 2);
    if (close == std::string_view::npos) {
      warnings.insert("unterminated link");
      out.append(s.substr(i));
      break;
    }
    if (nested != std::string_view::npos && nested < close) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view inner = s.substr(i + 2, close - i - 2);
    if (!starts_with_ci(inner, 0, "category:")) {
      const std::size_t bar = inner.rfind('|');
      out.append(bar == std::string_view::npos ? inner : inner.substr(bar + 1));
    }
    i = close + 2;
  }
  return out;
}

// Drops runs of two or more apostrophes (bold/italic markup).
std::string remove_quote_markup(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '\'') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] == '\'') ++j;
    if (j - i == 1) out.push_back('\'');
    i = j;
  }
  return out;
}

std::string strip_heading_line(std::string_view line) {
  std::size_t lead = 0;
  while (lead < line.size() && line[lead] == '=') ++lead;
  if (lead == 0) return std::string(line);
  std::size_t end = line.size();
  while (end > lead && (line[end - 1] == ' ' || line[end - 1] == '\t' || line[end - 1] == '\r')) --end;
  std::size_t trail = 0;
  while (end - trail > lead && line[end - trail - 1] == '=') ++trail;
  if (trail < lead) return std::string(line);
  std::string_view inner = line.substr(lead, end - trail - lead);
  while (!inner.empty() && (inner.front() == ' ' || inner.front() == '\t')) inner.remove_prefix(1);
  while (!inner.empty() && (inner.back() == ' ' || inner.back() == '\t')) inner.remove_suffix(1);
  if (inner.empty()) return std::string(line);
  std::string out(inner);
  out.append(line.substr(end));  // keep a trailing \r or spaces as they were
  return out;
}

std::string strip_headings(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (true) {
    const std::size_t nl = s.find('\n', i);
    const std::string_view line = s.substr(i, nl == std::string_view::npos ? std::string_view::npos : nl - i);
    out += strip_heading_line(line);
    if (nl == std::string_view::npos) break;
    out.push_back('\n');
    i = nl + 1;
  }
  return out;
}

std::string strip_once(std::string_view raw, std::set<std::string>& warnings) {
  std::string s = remove_comments(raw, warnings);
  s = remove_refs(s, warnings);
  s = remove_templates(s, warnings);
  s = replace_links(s, warnings);
  s = remove_quote_markup(s);
  return strip_headings(s);
}

}  // namespace

std::string strip_wikitext(std::string_view raw, std::vector<std::string>* warnings) {
  std::set<std::string> seen;
  std::string current(raw);
  while (true) {
    std::string next = strip_once(current, seen);
    if (next == current) break;
    current = std::move(next);
  }
  if (warnings != nullptr) warnings->insert(warnings->end(), seen.begin(), seen.end());
  return current;
}

// ---------------------------------------------------------------------------
// corpus files

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool plain = std::isalnum(c) || c == '-' || c == '_' || c == '~' || (c == '.' && i > 0);
    if (plain) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string url_decode(std::string_view text) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() && hex(text[i + 1]) >= 0 && hex(text[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex(text[i + 1]) * 16 + hex(text[i + 2])));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

Corpus load_corpus(std::span<const std::filesystem::path> paths, std::string label) {
  if (paths.empty()) throw Error("load_corpus: no input files for corpus '" + label + "'");
  Corpus corpus;
  corpus.label = std::move(label);
  std::unordered_map<std::string, std::string> seen_ids;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_corpus: cannot read '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error("load_corpus: read failed for '" + path.string() + "'");
    if (!unicode::is_valid_utf8(text)) {
      throw Error("load_corpus: '" + path.string() + "' is not valid UTF-8");
    }
    std::string id = url_decode(path.stem().string());
    if (id.empty()) throw Error("load_corpus: '" + path.string() + "' yields an empty document id");
    auto [it, inserted] = seen_ids.emplace(id, path.string());
    if (!inserted) {
      throw Error("load_corpus: '" + path.string() + "' and '" + it->second +
                  "' share document id '" + id + "'");
    }
    corpus.documents.push_back({std::move(id), std::move(text), DocumentSource::local_file});
  }
  return corpus;
}

Corpus load_corpus_dir(const std::filesystem::path& dir, std::string label) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error("load_corpus: '" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw Error("load_corpus: no .txt files in '" + dir.string() + "'");
  return load_corpus(paths, std::move(label));
}

void write_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& doc : corpus.documents) {
    const auto path = dir / (url_encode(doc.id) + ".txt");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << doc.raw_text;
    if (!out) throw Error("write_corpus_dir: cannot write '" + path.string() + "'");
  }
}

}  // namespace wikimim
