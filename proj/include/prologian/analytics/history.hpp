#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace prologian {

using PassSet = std::set<std::string>;

struct SubmissionRecord {
  std::string student;
  std::string assignment;
  std::int64_t timestamp = 0;
  std::string source;
  /// Ids (`suite:name`) of passing tests.
  PassSet passed;
  std::size_t clause_count = 0;
};

enum class Progress : std::uint8_t { FirstSubmission, BugFixed, BugIntroduced, Mixed, NoChange };
std::string_view to_string(Progress p);

struct HistoryLabel {
  Progress progress = Progress::FirstSubmission;
  bool correct = false;

  auto operator<=>(const HistoryLabel&) const = default;
  std::string str() const;
};

/// Strict superset, strict subset, both differences, or equal.
Progress compare_pass_sets(const PassSet& previous, const PassSet& current);

/// One label per submission. Throws std::invalid_argument on an empty history
/// or when timestamps are not strictly increasing.
std::vector<HistoryLabel> classify_history(const std::vector<SubmissionRecord>& history, const PassSet& full);
std::vector<HistoryLabel> classify_history(const std::vector<PassSet>& pass_sets, const PassSet& full);

}  // namespace prologian
