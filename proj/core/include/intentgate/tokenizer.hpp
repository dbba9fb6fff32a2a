#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace intentgate {

// Deterministic approximate tokenizer: one token per maximal alphanumeric run
// plus one per non-space punctuation byte. Cheap, stable, and good enough for
// budget math; it intentionally ignores real subword vocabularies.

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
};

std::vector<TokenSpan> token_spans(std::string_view text);
std::size_t token_count(std::string_view text);

// Longest prefix of text containing at most max_tokens tokens, with trailing
// whitespace trimmed.
std::string truncate_to_tokens(std::string_view text, std::size_t max_tokens);

}  // namespace intentgate
