#include "intentgate/tokenizer.hpp"

namespace intentgate {

namespace {

bool is_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<TokenSpan> token_spans(std::string_view text) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (is_alnum(c)) {
      std::size_t b = i;
      while (i < n && is_alnum(text[i])) ++i;
      out.push_back({b, i});
    } else {
      out.push_back({i, i + 1});
      ++i;
    }
  }
  return out;
}

std::size_t token_count(std::string_view text) { return token_spans(text).size(); }

std::string truncate_to_tokens(std::string_view text, std::size_t max_tokens) {
  auto spans = token_spans(text);
  if (spans.size() <= max_tokens) return std::string(text);
  if (max_tokens == 0) return std::string();
  std::size_t cut = spans[max_tokens - 1].end;
  std::string_view head = text.substr(0, cut);
  while (!head.empty() && is_space(head.back())) head.remove_suffix(1);
  return std::string(head);
}

}  // namespace intentgate
