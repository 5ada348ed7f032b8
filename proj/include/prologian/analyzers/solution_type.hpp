#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prologian/analyzers/call_graph.hpp"

namespace prologian {

enum class Technique : std::uint8_t { Recursive, NonRecursive, HigherOrder };
std::string_view to_string(Technique t);
/// Accepts "recursive", "nonrecursive"/"non_recursive", "higher_order"/"higherorder" (any case).
std::optional<Technique> parse_technique(std::string_view text);

struct SolutionTypeVerdict {
  PredicateIndicator predicate;
  Technique verdict = Technique::NonRecursive;
  /// Call sites on a cycle through the predicate.
  std::vector<SourceSpan> recursion_evidence;
  /// Meta-call sites in the predicate's own clauses.
  std::vector<SourceSpan> higher_order_evidence;

  bool recursive() const { return verdict == Technique::Recursive; }
  bool higher_order() const { return !higher_order_evidence.empty(); }
};

/// Throws std::invalid_argument when `pred` is not user-defined in `graph`.
SolutionTypeVerdict classify_solution_type(const CallGraph& graph, const PredicateIndicator& pred);

struct TechniqueRequirement {
  PredicateIndicator predicate;
  Technique required;
};

struct TechniqueViolation {
  PredicateIndicator predicate;
  Technique required;
  std::string message;
};

std::vector<TechniqueViolation> check_required_technique(const std::vector<SolutionTypeVerdict>& verdicts,
                                                         const std::vector<TechniqueRequirement>& required);

}  // namespace prologian
