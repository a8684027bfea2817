#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace wikimim::unicode {

// Decodes the code point starting at byte `pos` and advances `pos` past it.
// Ill-formed sequences decode as U+FFFD and advance by the bytes ICU
// consumed, so every byte of the input is visited exactly once.
char32_t next_code_point(std::string_view text, std::size_t& pos);

// Unicode White_Space property.
bool is_space(char32_t c);

// General category P* (punctuation) or S* (symbols).
bool is_edge_punct(char32_t c);

bool is_valid_utf8(std::string_view text);

// Full Unicode case folding.
std::string case_fold(std::string_view text);

}  // namespace wikimim::unicode
