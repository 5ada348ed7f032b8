#include "prologian/syntax/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "line_map.hpp"
#include "prologian/syntax/parser.hpp"

namespace prologian {
namespace {

bool is_symbol_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
    case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&': case '$':
      return true;
    default:
      return false;
  }
}

bool is_alnum(char c) {
  auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         u >= 0x80;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_layout(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src), lines_(src) {}

  TokenizeResult run() {
    while (true) {
      bool layout = skip_layout();
      if (pos_ >= src_.size()) break;
      std::size_t start = pos_;
      char c = src_[pos_];
      if (is_digit(c)) {
        lex_number(start, layout);
      } else if (c == '_' || (c >= 'A' && c <= 'Z')) {
        while (pos_ < src_.size() && is_alnum(src_[pos_])) ++pos_;
        push(TokenKind::Var, std::string(src_.substr(start, pos_ - start)), start, layout);
      } else if ((c >= 'a' && c <= 'z') || static_cast<unsigned char>(c) >= 0x80) {
        while (pos_ < src_.size() && is_alnum(src_[pos_])) ++pos_;
        push(TokenKind::Atom, std::string(src_.substr(start, pos_ - start)), start, layout);
      } else if (c == '\'') {
        lex_quoted(start, layout);
      } else if (c == '"') {
        lex_string(start, layout);
      } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
                 c == '|') {
        ++pos_;
        push(TokenKind::Punct, std::string(1, c), start, layout);
      } else if (c == '!' || c == ';') {
        ++pos_;
        push(TokenKind::Atom, std::string(1, c), start, layout);
      } else if (c == '.' && end_follows(pos_ + 1)) {
        ++pos_;
        push(TokenKind::End, ".", start, layout);
      } else if (is_symbol_char(c)) {
        while (pos_ < src_.size() && is_symbol_char(src_[pos_])) {
          // A trailing '.' followed by layout terminates the clause unless it completes an operator.
          if (src_[pos_] == '.' && pos_ > start && end_follows(pos_ + 1) &&
              !is_operator(src_.substr(start, pos_ + 1 - start)))
            break;
          ++pos_;
        }
        push(TokenKind::Atom, std::string(src_.substr(start, pos_ - start)), start, layout);
      } else {
        ++pos_;
        while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
        error("invalid character '" + std::string(src_.substr(start, pos_ - start)) + "'", start, pos_,
              layout);
      }
    }
    return std::move(result_);
  }

 private:
  bool end_follows(std::size_t at) const {
    return at >= src_.size() || is_layout(src_[at]) || src_[at] == '%';
  }

  // Returns true if any layout or comment was skipped.
  bool skip_layout() {
    bool skipped = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (is_layout(c)) {
        ++pos_;
        skipped = true;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        skipped = true;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        std::size_t start = pos_;
        auto close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          pos_ = src_.size();
          error("unterminated block comment", start, pos_, skipped);
          return true;
        }
        pos_ = close + 2;
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  void lex_number(std::size_t start, bool layout) {
    // 0'c character code
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
      if (pos_ + 2 < src_.size()) {
        std::size_t p = pos_ + 2;
        std::int64_t code;
        if (src_[p] == '\\' && p + 1 < src_.size()) {
          char e = src_[p + 1];
          code = e == 'n' ? '\n' : e == 't' ? '\t' : e;
          p += 2;
        } else if (src_[p] == '\'' && p + 1 < src_.size() && src_[p + 1] == '\'') {
          code = '\'';
          p += 2;
        } else {
          code = static_cast<unsigned char>(src_[p]);
          ++p;
        }
        pos_ = p;
        Token t = make(TokenKind::Integer, std::string(src_.substr(start, pos_ - start)), start, layout);
        t.int_value = code;
        result_.tokens.push_back(std::move(t));
        return;
      }
    }
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'o' || src_[pos_ + 1] == 'b')) {
      int base = src_[pos_ + 1] == 'x' ? 16 : src_[pos_ + 1] == 'o' ? 8 : 2;
      std::size_t p = pos_ + 2;
      std::size_t digits_start = p;
      while (p < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[p]))) ++p;
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(src_.data() + digits_start, src_.data() + p, v, base);
      if (p > digits_start && ec == std::errc() && ptr == src_.data() + p) {
        pos_ = p;
        Token t = make(TokenKind::Integer, std::string(src_.substr(start, pos_ - start)), start, layout);
        t.int_value = v;
        result_.tokens.push_back(std::move(t));
        return;
      }
    }
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    bool is_float = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
      is_float = true;
      pos_ += 1;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        while (p < src_.size() && is_digit(src_[p])) ++p;
        pos_ = p;
        is_float = true;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (is_float) {
      Token t = make(TokenKind::Float, text, start, layout);
      t.float_value = std::strtod(text.c_str(), nullptr);
      result_.tokens.push_back(std::move(t));
      return;
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc()) {
      error("integer literal out of range", start, pos_, layout);
      return;
    }
    Token t = make(TokenKind::Integer, text, start, layout);
    t.int_value = v;
    result_.tokens.push_back(std::move(t));
  }

  void lex_quoted(std::size_t start, bool layout) {
    std::string value;
    ++pos_;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        error("unterminated quoted atom", start, pos_, layout);
        return;
      }
      char c = src_[pos_];
      if (c == '\'') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
          value += '\'';
          pos_ += 2;
          continue;
        }
        ++pos_;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) {
          error("unterminated quoted atom", start, pos_ + 1, layout);
          pos_ = src_.size();
          return;
        }
        char e = src_[pos_ + 1];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '\\': value += '\\'; break;
          case '\'': value += '\''; break;
          default: {
            // Skip to the closing quote so the rest of the line lexes sensibly.
            std::size_t bad = pos_;
            auto close = src_.find('\'', pos_ + 2);
            auto eol = src_.find('\n', pos_);
            pos_ = (close != std::string_view::npos && close < eol) ? close + 1 : (eol == std::string_view::npos ? src_.size() : eol);
            error(std::string("unsupported escape sequence '\\") + e + "' in quoted atom", bad, bad + 2, layout,
                  start);
            return;
          }
        }
        pos_ += 2;
        continue;
      }
      value += c;
      ++pos_;
    }
    push(TokenKind::QuotedAtom, std::move(value), start, layout);
  }

  void lex_string(std::size_t start, bool layout) {
    ++pos_;
    while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
      if (src_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == '"') {
      ++pos_;
      error("double-quoted strings are not supported; use a quoted atom 'like this' or a list of codes",
            start, pos_, layout);
    } else {
      error("unterminated double-quoted string", start, pos_, layout);
    }
  }

  Token make(TokenKind kind, std::string text, std::size_t start, bool layout) const {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = lines_.span(start, pos_);
    t.layout_before = layout || start == 0;
    return t;
  }

  void push(TokenKind kind, std::string text, std::size_t start, bool layout) {
    result_.tokens.push_back(make(kind, std::move(text), start, layout));
  }

  void error(std::string message, std::size_t begin, std::size_t end, bool layout,
             std::size_t token_start = std::string_view::npos) {
    SourceSpan span = lines_.span(begin, end);
    SyntaxError err{std::move(message), span, {}};
    err.snippet = render_error(src_, err);
    result_.errors.push_back(err);
    Token t;
    t.kind = TokenKind::Error;
    t.text = err.message;
    t.span = token_start == std::string_view::npos ? span : lines_.span(token_start, pos_);
    t.layout_before = layout;
    result_.tokens.push_back(std::move(t));
  }

  std::string_view src_;
  LineMap lines_;
  std::size_t pos_ = 0;
  TokenizeResult result_;
};

}  // namespace

TokenizeResult tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace prologian
