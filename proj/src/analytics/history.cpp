#include "prologian/analytics/history.hpp"

#include <algorithm>
#include <stdexcept>

namespace prologian {

std::string_view to_string(Progress p) {
  switch (p) {
    case Progress::FirstSubmission: return "FirstSubmission";
    case Progress::BugFixed: return "BugFixed";
    case Progress::BugIntroduced: return "BugIntroduced";
    case Progress::Mixed: return "Mixed";
    case Progress::NoChange: return "NoChange";
  }
  return "?";
}

std::string HistoryLabel::str() const {
  return std::string(to_string(progress)) + (correct ? "/Correct" : "/Incorrect");
}

Progress compare_pass_sets(const PassSet& previous, const PassSet& current) {
  bool gained = !std::includes(previous.begin(), previous.end(), current.begin(), current.end());
  bool lost = !std::includes(current.begin(), current.end(), previous.begin(), previous.end());
  if (gained && lost) return Progress::Mixed;
  if (gained) return Progress::BugFixed;
  if (lost) return Progress::BugIntroduced;
  return Progress::NoChange;
}

std::vector<HistoryLabel> classify_history(const std::vector<PassSet>& pass_sets, const PassSet& full) {
  if (pass_sets.empty()) throw std::invalid_argument("empty submission history");
  std::vector<HistoryLabel> out;
  out.reserve(pass_sets.size());
  for (std::size_t i = 0; i < pass_sets.size(); ++i) {
    HistoryLabel l;
    l.progress = i == 0 ? Progress::FirstSubmission : compare_pass_sets(pass_sets[i - 1], pass_sets[i]);
    l.correct = pass_sets[i] == full;
    out.push_back(l);
  }
  return out;
}

std::vector<HistoryLabel> classify_history(const std::vector<SubmissionRecord>& history, const PassSet& full) {
  for (std::size_t i = 1; i < history.size(); ++i)
    if (history[i].timestamp <= history[i - 1].timestamp)
      throw std::invalid_argument("submission timestamps must be strictly increasing");
  std::vector<PassSet> sets;
  sets.reserve(history.size());
  for (const auto& r : history) sets.push_back(r.passed);
  return classify_history(sets, full);
}

}  // namespace prologian
