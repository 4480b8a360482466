#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace dynthreads {

// Character-level scanner shared by the term, tid and program parsers.
// Whitespace and `//` line comments are skipped before every token.
class TextCursor {
 public:
  explicit TextCursor(std::string_view text) : text_(text) {}

  void skip_space();
  bool at_end();
  char peek();
  // The next character without skipping whitespace.
  char peek_raw() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  // Consumes `token` if the input continues with it. Word-like tokens only
  // match on a word boundary, so `in` does not match the start of `inj1`.
  bool accept(std::string_view token);
  void expect(std::string_view token);
  bool looking_at(std::string_view token);
  bool looking_at_word(std::string_view word);

  std::optional<std::string> identifier();
  std::string expect_identifier(std::string_view what);
  std::optional<std::size_t> number();
  // Raw text up to (not including) `close`; used for action labels.
  std::string raw_until(char close);

  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

  [[noreturn]] void fail(const std::string& message) const;
  std::string location() const;

  static bool is_ident_start(char c);
  static bool is_ident_char(char c);

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace dynthreads
