#include "prologian/syntax/parser.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "prologian/syntax/lexer.hpp"
#include "line_map.hpp"

namespace prologian {

std::optional<OpDef> infix_op(std::string_view name) {
  static const std::map<std::string, OpDef, std::less<>> table = {
      {":-", {1200, OpType::XFX}}, {";", {1100, OpType::XFY}},   {"->", {1050, OpType::XFY}},
      {",", {1000, OpType::XFY}},  {"=", {700, OpType::XFX}},    {"\\=", {700, OpType::XFX}},
      {"==", {700, OpType::XFX}},  {"\\==", {700, OpType::XFX}}, {"is", {700, OpType::XFX}},
      {"=:=", {700, OpType::XFX}}, {"=\\=", {700, OpType::XFX}}, {"<", {700, OpType::XFX}},
      {">", {700, OpType::XFX}},   {"=<", {700, OpType::XFX}},   {">=", {700, OpType::XFX}},
      {"@<", {700, OpType::XFX}},  {"@>", {700, OpType::XFX}},   {"@=<", {700, OpType::XFX}},
      {"@>=", {700, OpType::XFX}}, {"=..", {700, OpType::XFX}},  {"rem", {400, OpType::YFX}},
      {"+", {500, OpType::YFX}},   {"-", {500, OpType::YFX}},    {"*", {400, OpType::YFX}},
      {"/", {400, OpType::YFX}},   {"//", {400, OpType::YFX}},   {"mod", {400, OpType::YFX}},
      {"**", {200, OpType::XFX}},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<OpDef> prefix_op(std::string_view name) {
  static const std::map<std::string, OpDef, std::less<>> table = {
      {":-", {1200, OpType::FX}},
      {"?-", {1200, OpType::FX}},
      {"\\+", {900, OpType::FY}},
      {"-", {200, OpType::FY}},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

bool is_operator(std::string_view name) { return infix_op(name) || prefix_op(name); }

namespace {

// Raised inside the parser; `silent` marks failures caused by a lexical error
// that was already reported.
struct ParseFailure {
  std::string message;
  SourceSpan span;
  bool silent = false;
};

class TermParser {
 public:
  TermParser(std::string_view source, const std::vector<Token>& tokens, std::size_t begin, std::size_t end)
      : source_(source), toks_(tokens), pos_(begin), end_(end) {}

  Term parse_full() {
    auto [t, prec] = parse(1200);
    (void)prec;
    if (pos_ < end_) {
      const Token& tok = toks_[pos_];
      if (tok.kind == TokenKind::Error) throw ParseFailure{tok.text, tok.span, true};
      if (infix_name(tok)) throw ParseFailure{"operator priority clash", tok.span};
      throw ParseFailure{"unexpected " + describe(tok) + "; expected an operator or the end of the clause",
                         tok.span};
    }
    return t;
  }

  int var_count() const { return next_var_; }

 private:
  struct Parsed {
    Term term;
    int prec;
  };

  bool at_end() const { return pos_ >= end_; }
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < end_ ? &toks_[pos_ + ahead] : nullptr;
  }

  SourceSpan end_span() const {
    if (pos_ < toks_.size()) {
      SourceSpan s = toks_[pos_].span;
      s.end_offset = s.start_offset;
      s.end_line = s.start_line;
      s.end_col = s.start_col;
      return s;
    }
    LineMap m(source_);
    return m.span(source_.size(), source_.size());
  }

  SourceSpan last_span() const { return pos_ > 0 ? toks_[pos_ - 1].span : end_span(); }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Punct: return "'" + t.text + "'";
      case TokenKind::End: return "'.'";
      case TokenKind::Var: return "variable " + t.text;
      case TokenKind::Integer:
      case TokenKind::Float: return "number " + t.text;
      default: return "'" + t.text + "'";
    }
  }

  static std::optional<std::string> infix_name(const Token& t) {
    if (t.kind == TokenKind::Punct && t.text == ",") return std::string(",");
    if (t.kind == TokenKind::Atom && infix_op(t.text)) return t.text;
    return std::nullopt;
  }

  // True when a prefix operator at this position must be read as an atom.
  bool operand_absent() const {
    const Token* n = peek();
    if (!n) return true;
    if (n->kind == TokenKind::Punct)
      return n->text == ")" || n->text == "," || n->text == "|" || n->text == "]" || n->text == "}";
    if (n->kind == TokenKind::End) return true;
    if (n->kind == TokenKind::Atom && infix_op(n->text) && !prefix_op(n->text)) {
      // `- = x` reads '-' as an atom; `- (a)` does not reach here.
      const Token* after = peek(1);
      return !(after && after->is_punct('(') && !after->layout_before);
    }
    return false;
  }

  Term make_var(const Token& t) {
    if (t.text == "_") return Term::var("_", next_var_++, t.span);
    auto it = vars_.find(t.text);
    if (it == vars_.end()) it = vars_.emplace(t.text, next_var_++).first;
    return Term::var(t.text, it->second, t.span);
  }

  void expect_close(char close, const SourceSpan& open_span) {
    const Token* t = peek();
    if (t && t->is_punct(close)) {
      ++pos_;
      return;
    }
    if (t && t->kind == TokenKind::Error) throw ParseFailure{t->text, t->span, true};
    std::string what = close == ')' ? "parenthesis" : close == ']' ? "bracket" : "brace";
    if (!t || t->kind == TokenKind::End) {
      throw ParseFailure{"unbalanced " + what + ": missing '" + std::string(1, close) + "'",
                         merge(open_span, last_span())};
    }
    throw ParseFailure{"expected '" + std::string(1, close) + "' or ',' but found " + describe(*t), t->span};
  }

  std::vector<Term> parse_args(const SourceSpan& open_span) {
    std::vector<Term> args;
    while (true) {
      args.push_back(parse(999).term);
      const Token* t = peek();
      if (t && t->is_punct(',')) {
        ++pos_;
        continue;
      }
      expect_close(')', open_span);
      return args;
    }
  }

  Parsed parse_primary(int max_prec) {
    const Token* tp = peek();
    if (!tp) throw ParseFailure{"unexpected end of clause", end_span()};
    const Token& tok = *tp;
    switch (tok.kind) {
      case TokenKind::Error:
        throw ParseFailure{tok.text, tok.span, true};
      case TokenKind::End:
        throw ParseFailure{"unexpected end of clause", tok.span};
      case TokenKind::Integer:
        ++pos_;
        return {Term::integer(tok.int_value, tok.span), 0};
      case TokenKind::Float:
        ++pos_;
        return {Term::floating(tok.float_value, tok.span), 0};
      case TokenKind::Var:
        ++pos_;
        return {make_var(tok), 0};
      case TokenKind::Punct:
        return parse_punct(tok);
      case TokenKind::Atom:
      case TokenKind::QuotedAtom:
        return parse_atom_start(tok, max_prec);
    }
    throw ParseFailure{"unexpected token", tok.span};
  }

  Parsed parse_punct(const Token& tok) {
    if (tok.text == "(") {
      ++pos_;
      Term inner = parse(1200).term;
      expect_close(')', tok.span);
      inner.span = merge(tok.span, last_span());
      return {std::move(inner), 0};
    }
    if (tok.text == "[") {
      ++pos_;
      const Token* n = peek();
      if (n && n->is_punct(']')) {
        ++pos_;
        return {Term::nil(merge(tok.span, n->span)), 0};
      }
      std::vector<Term> items;
      items.push_back(parse(999).term);
      Term tail = Term::nil();
      bool explicit_tail = false;
      while (true) {
        const Token* t = peek();
        if (t && t->is_punct(',')) {
          ++pos_;
          items.push_back(parse(999).term);
          continue;
        }
        if (t && t->is_punct('|')) {
          ++pos_;
          tail = parse(999).term;
          explicit_tail = true;
        }
        break;
      }
      expect_close(']', tok.span);
      SourceSpan whole = merge(tok.span, last_span());
      if (!explicit_tail) {
        tail.span = last_span();
      }
      // Each cons cell spans from its element to the closing bracket.
      Term out = std::move(tail);
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        SourceSpan cell = merge(it->span, whole);
        cell.start_offset = it->span.start_offset;
        cell.start_line = it->span.start_line;
        cell.start_col = it->span.start_col;
        out = Term::cons(std::move(*it), std::move(out), cell);
      }
      out.span = whole;
      return {std::move(out), 0};
    }
    if (tok.text == "{") {
      ++pos_;
      const Token* n = peek();
      if (n && n->is_punct('}')) {
        ++pos_;
        return {Term::atom("{}", merge(tok.span, n->span)), 0};
      }
      Term inner = parse(1200).term;
      expect_close('}', tok.span);
      return {Term::compound("{}", {std::move(inner)}, merge(tok.span, last_span())), 0};
    }
    throw ParseFailure{"unexpected " + describe(tok), tok.span};
  }

  Parsed parse_atom_start(const Token& tok, int max_prec) {
    ++pos_;
    const Token* next = peek();
    if (next && next->is_punct('(') && !next->layout_before) {
      ++pos_;
      auto args = parse_args(tok.span);
      return {Term::compound(tok.text, std::move(args), merge(tok.span, last_span())), 0};
    }
    bool quoted = tok.kind == TokenKind::QuotedAtom;
    if (!quoted && tok.text == "-" && next && !next->layout_before &&
        (next->kind == TokenKind::Integer || next->kind == TokenKind::Float)) {
      ++pos_;
      SourceSpan span = merge(tok.span, next->span);
      if (next->kind == TokenKind::Integer) return {Term::integer(-next->int_value, span), 0};
      return {Term::floating(-next->float_value, span), 0};
    }
    if (!quoted) {
      if (auto op = prefix_op(tok.text); op && !operand_absent()) {
        int prec = op->priority;
        int arg_max = op->type == OpType::FY ? prec : prec - 1;
        if (prec > max_prec) {
          // Lenient: `X = \+ a` reads as `X = (\+ a)`.
          prec = max_prec;
          arg_max = std::min(arg_max, max_prec);
        }
        Term operand = parse(arg_max).term;
        SourceSpan span = merge(tok.span, operand.span);
        return {Term::compound(tok.text, {std::move(operand)}, span), prec};
      }
    }
    return {Term::atom(tok.text, tok.span), 0};
  }

  Parsed parse(int max_prec) {
    Parsed left = parse_primary(max_prec);
    while (true) {
      const Token* t = peek();
      if (!t) break;
      auto name = infix_name(*t);
      if (!name) break;
      auto op = infix_op(*name);
      int p = op->priority;
      int left_max = op->type == OpType::YFX ? p : p - 1;
      int right_max = op->type == OpType::XFY ? p : p - 1;
      if (p > max_prec || left.prec > left_max) break;
      ++pos_;
      Term right = parse(right_max).term;
      SourceSpan span = merge(left.term.span, right.span);
      left = {Term::compound(*name, {std::move(left.term), std::move(right)}, span), p};
    }
    return left;
  }

  std::string_view source_;
  const std::vector<Token>& toks_;
  std::size_t pos_;
  std::size_t end_;
  std::map<std::string, int> vars_;
  int next_var_ = 0;
};

SyntaxError to_error(std::string_view source, const ParseFailure& f) {
  return make_syntax_error(source, f.message, f.span);
}

}  // namespace

ReadResult read_terms(std::string_view source) {
  ReadResult out;
  TokenizeResult lexed = tokenize(source);
  out.errors = lexed.errors;
  const auto& toks = lexed.tokens;
  std::size_t i = 0;
  while (i < toks.size()) {
    std::size_t begin = i;
    while (i < toks.size() && toks[i].kind != TokenKind::End) ++i;
    std::size_t end = i;
    bool terminated = i < toks.size();
    if (terminated) ++i;
    if (begin == end) {
      if (terminated) out.errors.push_back(make_syntax_error(source, "unexpected '.'", toks[end].span));
      continue;
    }
    bool has_lex_error = false;
    for (std::size_t k = begin; k < end; ++k)
      if (toks[k].kind == TokenKind::Error) has_lex_error = true;
    try {
      TermParser parser(source, toks, begin, end);
      Term t = parser.parse_full();
      if (!terminated) {
        throw ParseFailure{"missing terminating '.' after clause", toks[end - 1].span};
      }
      SourceSpan span = merge(toks[begin].span, toks[end].span);
      out.terms.push_back({std::move(t), span, parser.var_count()});
    } catch (const ParseFailure& f) {
      if (!(f.silent || has_lex_error)) out.errors.push_back(to_error(source, f));
    }
  }
  std::stable_sort(out.errors.begin(), out.errors.end(), [](const SyntaxError& a, const SyntaxError& b) {
    return a.span.start_offset < b.span.start_offset;
  });
  return out;
}

std::optional<Clause> term_to_clause(const ReadTerm& rt, Origin origin, std::string* error) {
  auto fail = [&](std::string msg) -> std::optional<Clause> {
    if (error) *error = std::move(msg);
    return std::nullopt;
  };
  const Term& t = rt.term;
  Clause c;
  c.span = rt.span;
  c.origin = origin;
  c.var_count = rt.var_count;
  if (t.is_compound(":-", 2)) {
    c.head = t.args[0];
    c.body = flatten_conjunction(t.args[1]);
  } else {
    c.head = t;
  }
  if (c.head.is_var()) return fail("clause head cannot be a variable");
  if (!c.head.is_callable()) return fail("clause head must be an atom or compound term");
  if (c.head.is_compound(",", 2) || c.head.is_compound(";", 2) || c.head.is_compound("->", 2))
    return fail("cannot define control construct " + c.head.indicator().str());
  for (const auto& g : c.body)
    if (g.is_number()) return fail("body goal must be callable, found a number");
  return c;
}

ParseResult parse_program(std::string_view source, Origin origin) {
  ParseResult out;
  ReadResult read = read_terms(source);
  out.errors = std::move(read.errors);
  for (auto& rt : read.terms) {
    if (rt.term.is_compound(":-", 1) || rt.term.is_compound("?-", 1)) {
      out.program.add_directive(rt.term.args[0]);
      continue;
    }
    std::string msg;
    if (auto clause = term_to_clause(rt, origin, &msg)) {
      out.program.add_clause(std::move(*clause));
    } else {
      out.errors.push_back(make_syntax_error(source, msg, rt.term.span));
    }
  }
  std::stable_sort(out.errors.begin(), out.errors.end(), [](const SyntaxError& a, const SyntaxError& b) {
    return a.span.start_offset < b.span.start_offset;
  });
  return out;
}

Term parse_term(std::string_view source) {
  TokenizeResult lexed = tokenize(source);
  if (!lexed.errors.empty()) throw SyntaxErrorException(lexed.errors.front());
  auto& toks = lexed.tokens;
  std::size_t end = toks.size();
  if (end > 0 && toks[end - 1].kind == TokenKind::End) --end;
  for (std::size_t i = 0; i < end; ++i)
    if (toks[i].kind == TokenKind::End)
      throw SyntaxErrorException(make_syntax_error(source, "unexpected '.' inside query", toks[i].span));
  if (end == 0) {
    throw SyntaxErrorException(make_syntax_error(source, "empty query", span_of(source, 0, source.size())));
  }
  try {
    TermParser parser(source, toks, 0, end);
    return parser.parse_full();
  } catch (const ParseFailure& f) {
    throw SyntaxErrorException(to_error(source, f));
  }
}

Term parse_query(std::string_view source) {
  Term t = parse_term(source);
  if (t.is_number()) {
    throw SyntaxErrorException(make_syntax_error(source, "query must be callable", t.span));
  }
  return t;
}

}  // namespace prologian
