#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prologian/syntax/diagnostics.hpp"
#include "prologian/syntax/term.hpp"

namespace prologian {

/// A subterm of a clause: the head or one body goal, then 1-based argument
/// indices descending from it.
struct TermPosition {
  enum class Part : std::uint8_t { Head, Body };
  Part part = Part::Head;
  std::size_t goal = 0;
  std::vector<std::size_t> args;

  bool is_goal() const { return part == Part::Body && args.empty(); }
  std::string str() const;
  bool operator==(const TermPosition&) const = default;
};

const Term* term_at(const Clause& clause, const TermPosition& pos);

enum class EditKind : std::uint8_t { Replace, Relabel, Insert, Delete, Move };
std::string_view to_string(EditKind k);

/// One atomic change. Relabel swaps a compound's functor and keeps its
/// arguments; the before/after terms are the full subterms.
struct EditOp {
  EditKind kind = EditKind::Replace;
  std::optional<TermPosition> old_pos;
  std::optional<TermPosition> new_pos;
  std::optional<Term> before;
  std::optional<Term> after;

  std::string str() const;
};

enum class ClauseEditKind : std::uint8_t { ClauseAdded, ClauseRemoved, ClauseModified };
std::string_view to_string(ClauseEditKind k);

struct ClauseEdit {
  ClauseEditKind kind = ClauseEditKind::ClauseModified;
  std::optional<Clause> old_clause;
  std::optional<Clause> new_clause;
  /// Position of the clause within its predicate.
  std::optional<std::size_t> old_index;
  std::optional<std::size_t> new_index;
  /// Empty unless kind is ClauseModified.
  std::vector<EditOp> script;
};

enum class DiffKind : std::uint8_t { Added, Removed, Modified };
std::string_view to_string(DiffKind k);

struct PredicateDiff {
  PredicateIndicator predicate;
  DiffKind kind = DiffKind::Modified;
  /// Set when the predicate was matched to a removed one by name similarity.
  std::optional<PredicateIndicator> renamed_from;
  std::vector<ClauseEdit> edits;

  std::string str() const;
};

class DiffError : public std::runtime_error {
 public:
  DiffError(std::string message, std::vector<SyntaxError> errors)
      : std::runtime_error(std::move(message)), errors_(std::move(errors)) {}
  const std::vector<SyntaxError>& errors() const { return errors_; }

 private:
  std::vector<SyntaxError> errors_;
};

/// Edit script between two clauses; empty iff they are equal up to spans.
std::vector<EditOp> diff_clauses(const Clause& old_clause, const Clause& new_clause);

/// Predicates in order of first appearance (new program first, then removed).
std::vector<PredicateDiff> diff_programs(const Program& old_program, const Program& new_program);

/// Parses both sources first. Throws DiffError when either has syntax errors.
std::vector<PredicateDiff> diff_sources(std::string_view old_source, std::string_view new_source);

}  // namespace prologian
