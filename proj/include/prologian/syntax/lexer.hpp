#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prologian/syntax/diagnostics.hpp"

namespace prologian {

enum class TokenKind : std::uint8_t {
  Atom,
  QuotedAtom,
  Var,
  Integer,
  Float,
  Punct,  // ( ) [ ] { } , |
  End,    // clause-terminating '.'
  Error,  // placeholder for a lexical error, so the parser can skip the clause
};

struct Token {
  TokenKind kind;
  std::string text;  // atom/var name, punctuation char, or raw number text
  std::int64_t int_value = 0;
  double float_value = 0.0;
  SourceSpan span;
  /// Whitespace or a comment precedes this token.
  bool layout_before = false;

  bool is_punct(char c) const { return kind == TokenKind::Punct && text.size() == 1 && text[0] == c; }
  bool is_name(std::string_view n) const {
    return (kind == TokenKind::Atom || kind == TokenKind::QuotedAtom) && text == n;
  }
};

struct TokenizeResult {
  std::vector<Token> tokens;
  std::vector<SyntaxError> errors;
  bool ok() const { return errors.empty(); }
};

/// Comments are skipped. Each lexical error also leaves an Error token in the
/// stream at the position it occurred.
TokenizeResult tokenize(std::string_view source);

}  // namespace prologian
