#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prologian/analyzers/solution_type.hpp"
#include "prologian/analyzers/warnings.hpp"
#include "prologian/harness/runner.hpp"
#include "prologian/scoring/scorecard.hpp"
#include "prologian/syntax/diagnostics.hpp"

namespace prologian {

constexpr int kReportSchemaVersion = 1;

struct ReportInput {
  std::string submission;
  std::string source;
  std::vector<SyntaxError> syntax_errors;
  std::vector<TestCase> cases;
  std::vector<TestResult> results;
  std::vector<Warning> warnings;
  std::vector<SolutionTypeVerdict> verdicts;
  std::vector<TechniqueRequirement> requirements;
  std::vector<TechniqueViolation> violations;
  Scorecard scorecard;
  bool reveal_bodies = true;
};

struct Report {
  nlohmann::ordered_json document;
  std::string markdown;
  std::string json;
};

/// Builds the structured document, then renders markdown from it. Pure.
Report render_report(const ReportInput& input);

std::string render_markdown(const nlohmann::ordered_json& document);

}  // namespace prologian
