#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prologian/analytics/program_diff.hpp"

namespace prologian {

enum class BugType : std::uint8_t {
  Incomplete,
  WrongArgument,
  RuleGoalProblems,
  OperatorError,
  WrongPredicateName,
  DomainLogicProblem,
  CutProblem,
  WrongVariableConstant,
  Other,
};

enum class BugSubtype : std::uint8_t {
  MissingPredicate,
  MissingClause,
  ArgumentOrderSwap,
  MissingArgument,
  ExtraArgument,
  ExtraGoal,
  MissingGoal,
  GoalOrderSwap,
  WrongOperator,
  ListTerminatorsIssue,
  MissingNegation,
  MissingCut,
  ExtraCut,
  WrongPlacement,
  WrongVariableName,
  WrongConstant,
  OtherSubtype,
};

std::string_view to_string(BugType t);
std::string_view to_string(BugSubtype s);

/// Whether the taxonomy lists `s` under `t`.
bool subtype_allowed(BugType t, BugSubtype s);

struct BugLabel {
  BugType type = BugType::Other;
  std::optional<BugSubtype> subtype;
  PredicateIndicator predicate;
  std::optional<SourceSpan> evidence;

  std::string str() const;
};

/// More atomic edits than this in one clause count as a rewrite.
constexpr std::size_t kRewriteThreshold = 3;

/// Labels the fix old -> new. One label per distinct (type, subtype, predicate),
/// sorted. Throws std::invalid_argument on an empty diff.
std::vector<BugLabel> classify_bug(const std::vector<PredicateDiff>& diff, const Program& old_program,
                                   const Program& new_program);

/// Distinct top-level types in `labels`.
std::set<BugType> bug_types(const std::vector<BugLabel>& labels);

}  // namespace prologian
