#pragma once

#include <string>

#include "prologian/syntax/term.hpp"

namespace prologian {

struct WriteOptions {
  bool quoted = true;
  /// Write operators in functional notation, e.g. `+(1,2)`.
  bool ignore_ops = false;
};

/// Writes `t` so that reading the text back yields the same structure.
std::string format_term(const Term& t, WriteOptions opts = {});

/// Formats a clause as `Head :- G1, G2.` or `Fact.`
std::string format_clause(const Clause& c);

/// Shortest round-tripping representation, always with a '.' or exponent.
std::string format_float(double v);

bool atom_needs_quotes(std::string_view name);
std::string quote_atom(std::string_view name);

/// Renames variables `A`, `B`, ..., `Z`, `A1`, ... in order of first occurrence.
Term number_vars(const Term& t);

}  // namespace prologian
