#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prologian/analyzers/solution_type.hpp"
#include "prologian/analyzers/suggest.hpp"
#include "prologian/harness/runner.hpp"

namespace prologian {

enum class WarningKind : std::uint8_t { OpenChoicePoint, UnknownPredicate, Divergence, TechniqueViolation };
std::string_view to_string(WarningKind k);

struct Warning {
  WarningKind kind;
  /// Test id or predicate indicator; (kind, subject) is unique in a list.
  std::string subject;
  std::string message;
  std::optional<SourceSpan> span;
  std::optional<Suggestion> suggestion;
};

/// Informational warnings, sorted by (kind, subject).
std::vector<Warning> synthesize_warnings(const std::vector<TestResult>& results,
                                         const std::vector<RuntimeError>& unknowns,
                                         const std::set<PredicateIndicator>& defined,
                                         const std::vector<TechniqueViolation>& violations = {});

}  // namespace prologian
