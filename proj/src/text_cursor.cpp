#include "dynthreads/text_cursor.hpp"

#include <cctype>

#include "dynthreads/error.hpp"

namespace dynthreads {

bool TextCursor::is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool TextCursor::is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

void TextCursor::skip_space() {
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
    } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    } else {
      break;
    }
  }
}

bool TextCursor::at_end() {
  skip_space();
  return pos_ >= text_.size();
}

char TextCursor::peek() {
  skip_space();
  return pos_ < text_.size() ? text_[pos_] : '\0';
}

bool TextCursor::looking_at(std::string_view token) {
  skip_space();
  if (text_.substr(pos_, token.size()) != token) return false;
  if (!token.empty() && is_ident_char(token.back())) {
    std::size_t end = pos_ + token.size();
    if (end < text_.size() && is_ident_char(text_[end])) return false;
  }
  return true;
}

bool TextCursor::looking_at_word(std::string_view word) { return looking_at(word); }

bool TextCursor::accept(std::string_view token) {
  if (!looking_at(token)) return false;
  pos_ += token.size();
  return true;
}

void TextCursor::expect(std::string_view token) {
  if (!accept(token)) fail("expected '" + std::string(token) + "'");
}

std::optional<std::string> TextCursor::identifier() {
  skip_space();
  if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) return std::nullopt;
  std::size_t start = pos_;
  while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
  return std::string(text_.substr(start, pos_ - start));
}

std::string TextCursor::expect_identifier(std::string_view what) {
  auto id = identifier();
  if (!id) fail("expected " + std::string(what));
  return *id;
}

std::optional<std::size_t> TextCursor::number() {
  skip_space();
  if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
    return std::nullopt;
  }
  std::size_t value = 0;
  while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
    value = value * 10 + static_cast<std::size_t>(text_[pos_] - '0');
    ++pos_;
  }
  return value;
}

std::string TextCursor::raw_until(char close) {
  skip_space();
  std::size_t start = pos_;
  while (pos_ < text_.size() && text_[pos_] != close) {
    if (std::isspace(static_cast<unsigned char>(text_[pos_]))) fail("whitespace in label");
    ++pos_;
  }
  if (pos_ >= text_.size()) fail(std::string("unterminated label, expected '") + close + "'");
  if (pos_ == start) fail("empty label");
  return std::string(text_.substr(start, pos_ - start));
}

std::string TextCursor::location() const {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
    if (text_[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

void TextCursor::fail(const std::string& message) const {
  throw Error(ErrorKind::Parse, location() + ": " + message);
}

}  // namespace dynthreads
