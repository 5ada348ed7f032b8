#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prologian/analyzers/solution_type.hpp"
#include "prologian/engine/engine.hpp"
#include "prologian/harness/test_file.hpp"

namespace prologian {

struct PredicateSpec {
  PredicateIndicator predicate;
  unsigned points = 0;
  /// Test suite whose results decide this predicate's points.
  std::string suite;
  std::optional<Technique> technique;
};

struct AssignmentSpec {
  std::string assignment;
  std::vector<PredicateSpec> predicates;
  EngineLimits limits;
  /// Show the source of failing tests in reports.
  bool reveal_bodies = true;

  const PredicateSpec* find_suite(std::string_view suite) const;
};

/// Malformed or inconsistent assignment specification.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the JSON form and checks the structural invariants (unique
/// predicates and suites, positive limits). Throws SpecError.
AssignmentSpec parse_assignment_spec(std::string_view json_text);
AssignmentSpec load_assignment_spec(const std::filesystem::path& path);

/// Rejects specs whose suites are absent from the test file, or that award
/// points for a suite without tests. Throws SpecError.
void validate_against_tests(const AssignmentSpec& spec, const TestFile& tests);

std::string to_json(const AssignmentSpec& spec);

}  // namespace prologian
