#include "prologian/analyzers/warnings.hpp"

#include <algorithm>

namespace prologian {

std::string_view to_string(WarningKind k) {
  switch (k) {
    case WarningKind::OpenChoicePoint: return "OpenChoicePoint";
    case WarningKind::UnknownPredicate: return "UnknownPredicate";
    case WarningKind::Divergence: return "Divergence";
    case WarningKind::TechniqueViolation: return "TechniqueViolation";
  }
  return "?";
}

namespace {

std::string did_you_mean(const Suggestion& s) {
  if (s.candidates.empty()) return "";
  std::string out = "; did you mean ";
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    if (i > 0) out += i + 1 == s.candidates.size() ? " or " : ", ";
    out += s.candidates[i].predicate.str();
  }
  return out + "?";
}

}  // namespace

std::vector<Warning> synthesize_warnings(const std::vector<TestResult>& results,
                                         const std::vector<RuntimeError>& unknowns,
                                         const std::set<PredicateIndicator>& defined,
                                         const std::vector<TechniqueViolation>& violations) {
  std::vector<Warning> out;
  for (const auto& r : results) {
    if (r.open_choice_warning) {
      std::string msg = "test " + r.id() + " succeeded but left a choice point open";
      if (r.second_answer) msg += "; backtracking gives another answer: " + *r.second_answer;
      else msg += "; check whether more answers are intended";
      out.push_back({WarningKind::OpenChoicePoint, r.id(), msg, std::nullopt, std::nullopt});
    }
    if (r.verdict == Verdict::Diverged) {
      std::string where = r.call_chain.empty() ? "the test goal" : r.call_chain.back().str();
      out.push_back({WarningKind::Divergence, r.id(),
                     "possible infinite loop in " + where + " (test " + r.id() + " reached the step limit after " +
                         std::to_string(r.steps_used) + " steps)",
                     std::nullopt, std::nullopt});
    }
  }
  for (const auto& u : unknowns) {
    Suggestion s = suggest_predicates(u.predicate, defined);
    out.push_back({WarningKind::UnknownPredicate, u.predicate.str(),
                   "unknown predicate " + u.predicate.str() + did_you_mean(s), u.culprit, s});
  }
  for (const auto& v : violations)
    out.push_back({WarningKind::TechniqueViolation, v.predicate.str(), v.message, std::nullopt, std::nullopt});

  std::stable_sort(out.begin(), out.end(), [](const Warning& a, const Warning& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.subject < b.subject;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Warning& a, const Warning& b) { return a.kind == b.kind && a.subject == b.subject; }),
            out.end());
  return out;
}

}  // namespace prologian
