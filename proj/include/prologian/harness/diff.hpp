#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian {

struct PathStep {
  enum class Kind : std::uint8_t { Arg, ListElem, ListTail };
  Kind kind;
  /// 1-based for Arg, 0-based for ListElem; ListTail(i) is the tail after element i.
  std::size_t index;

  bool operator==(const PathStep&) const = default;
};

std::string format_path(const std::vector<PathStep>& path);

struct AssertionDiff {
  Term expected;
  /// nullopt stands for "no solution".
  std::optional<Term> actual;
  bool diverges = false;
  std::vector<PathStep> path;
  /// Subterms at the first divergence.
  Term expected_at;
  std::optional<Term> actual_at;
  std::string rendered;

  bool empty() const { return !diverges; }
};

/// Walks both terms simultaneously and reports the first mismatch.
AssertionDiff diff_outputs(const Term& expected, const Term& actual);
AssertionDiff no_solution_diff(const Term& expected);

/// Follows `path` inside `t`; nullptr if it does not address a subterm.
const Term* subterm_at(const Term& t, const std::vector<PathStep>& path);

/// Structural equality with variables matched up to consistent renaming.
bool variant_equal(const Term& a, const Term& b);

}  // namespace prologian
