#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wikimim {

// A maximal run of non-whitespace, split into edge punctuation and core.
// lead_punct + stripped + trail_punct == text always holds.
struct Token {
  std::string text;
  std::string stripped;
  std::string lead_punct;
  std::string trail_punct;

  // Computes the decomposition of `text`. Edge characters are those in the
  // Unicode P* and S* categories; punctuation inside the core is untouched.
  static Token from_text(std::string text);

  bool operator==(const Token&) const = default;
};

// separators.size() == tokens.size() + 1; separators[i] precedes tokens[i]
// and the last entry trails the final token. Leading/trailing runs may be
// empty.
struct TokenStream {
  std::vector<Token> tokens;
  std::vector<std::string> separators;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

TokenStream tokenize(std::string_view text);

// Throws Error if the separator count does not match the token count.
std::string detokenize(const TokenStream& stream);

// Token texts / stripped cores of a stream, in order.
std::vector<std::string> token_texts(const TokenStream& stream);
std::vector<std::string> stripped_words(const TokenStream& stream);

// Removes templates, link markup, <ref> tags, HTML comments, bold/italic
// quote runs and heading markers. Bracketed citation markers such as "[157]"
// are ordinary text and survive. Runs to a fixed point, so the result is
// stable under a second call. Unbalanced markup is left in place and a
// message is appended to `warnings` when given.
std::string strip_wikitext(std::string_view raw,
                           std::vector<std::string>* warnings = nullptr);

enum class DocumentSource { local_file, remote_fetch };

struct Document {
  std::string id;
  std::string raw_text;
  DocumentSource source = DocumentSource::local_file;
};

struct Corpus {
  std::string label;
  std::vector<Document> documents;
};

// One document per path, in the order given. The document id is the
// URL-decoded file stem. Throws Error for zero paths, an unreadable file,
// invalid UTF-8 or duplicate ids; the message names the offending path.
Corpus load_corpus(std::span<const std::filesystem::path> paths, std::string label);

// Loads every *.txt file in `dir`, sorted by file name.
Corpus load_corpus_dir(const std::filesystem::path& dir, std::string label);

// Writes one <url-encoded id>.txt per document into `dir` (created if
// needed). Existing files with other names are left alone.
void write_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir);

std::string url_encode(std::string_view text);
std::string url_decode(std::string_view text);

}  // namespace wikimim
