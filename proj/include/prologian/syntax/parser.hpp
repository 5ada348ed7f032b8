#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "prologian/syntax/diagnostics.hpp"
#include "prologian/syntax/term.hpp"

namespace prologian {

enum class OpType : std::uint8_t { XFX, XFY, YFX, FY, FX };

struct OpDef {
  int priority;
  OpType type;
};

/// The fixed operator table. There are no user-defined operators.
std::optional<OpDef> infix_op(std::string_view name);
std::optional<OpDef> prefix_op(std::string_view name);
bool is_operator(std::string_view name);

/// A term read from source, terminated by '.'.
struct ReadTerm {
  Term term;
  SourceSpan span;  // includes the terminating '.'
  int var_count = 0;
};

struct ReadResult {
  std::vector<ReadTerm> terms;
  std::vector<SyntaxError> errors;
};

/// Reads '.'-terminated terms. A failing term is reported and skipped; reading
/// resumes after the next clause terminator.
ReadResult read_terms(std::string_view source);

struct ParseResult {
  Program program;
  std::vector<SyntaxError> errors;
  bool ok() const { return errors.empty(); }
};

/// Parses a whole program. Clauses that fail to parse are dropped and every
/// error is reported; directives (`:- G.`) are kept separately.
ParseResult parse_program(std::string_view source, Origin origin = Origin::Submission);

/// Converts a read term into a clause, or returns an error message.
std::optional<Clause> term_to_clause(const ReadTerm& rt, Origin origin, std::string* error = nullptr);

/// Parses a goal or conjunction; a trailing '.' is optional. Throws
/// SyntaxErrorException.
Term parse_query(std::string_view source);

/// Parses a single term (same rules as parse_query).
Term parse_term(std::string_view source);

}  // namespace prologian
