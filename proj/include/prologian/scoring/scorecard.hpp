#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prologian/harness/runner.hpp"
#include "prologian/scoring/assignment.hpp"

namespace prologian {

struct PredicateScore {
  PredicateIndicator predicate;
  std::string suite;
  std::size_t passed = 0;
  std::size_t total = 0;
  unsigned points_possible = 0;
  /// Either 0 or points_possible.
  unsigned points_awarded = 0;
};

struct Scorecard {
  std::string assignment;
  std::vector<PredicateScore> predicates;
  unsigned total_points = 0;
  unsigned max_points = 0;
  std::size_t tests_passed = 0;
  std::size_t tests_total = 0;
  std::size_t warnings = 0;
  /// Seconds since the Unix epoch.
  std::int64_t timestamp = 0;
};

/// All-or-nothing per predicate. Throws SpecError when a spec suite has no
/// results.
Scorecard score_submission(const std::vector<TestResult>& results, const AssignmentSpec& spec,
                           std::size_t warnings = 0, std::int64_t timestamp = 0);

std::string scorecard_to_json(const Scorecard& card);
/// Throws SpecError on malformed input.
Scorecard scorecard_from_json(std::string_view json_text);

/// `2024-03-05T10:00:00Z`.
std::string format_timestamp(std::int64_t seconds);

}  // namespace prologian
