#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian::detail {

enum class Builtin : std::uint8_t {
  True, Fail, Cut, Unify, NotUnify, Identical, NotIdentical, Is, ArithEq, ArithNe, Less, Greater, LessEq,
  GreaterEq, Not, Conj, Disj, IfThen, Call, Findall, Between, Var, Nonvar, Atom, Number, Integer, Float,
  Atomic, Compound, Callable, IsList, Msort, Sort, Compare, TermLess, TermGreater, TermLessEq, TermGreaterEq,
  Write, Print, Writeln, Nl, Format, Functor, Arg, Univ, CopyTerm, Succ, Plus,
};

struct BuiltinSpec {
  std::string_view name;
  std::size_t arity;
  Builtin id;
};

const std::vector<BuiltinSpec>& builtin_specs();

/// The bundled library, parsed once. Helper predicates are '$'-prefixed.
const Program& library_program();

}  // namespace prologian::detail
