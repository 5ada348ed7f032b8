#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prologian/analytics/history.hpp"
#include "prologian/engine/engine.hpp"

namespace prologian {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Records sorted by (assignment, student, timestamp).
struct Corpus {
  std::vector<SubmissionRecord> records;
  /// Every test id per assignment.
  std::map<std::string, PassSet> full_sets;
};

/// Reads `<root>/<assignment>/<student>/<unix-timestamp>.pl` with one
/// `<root>/<assignment>/tests.plt` each, and runs the tests on every file.
Corpus load_corpus(const std::filesystem::path& root, const std::optional<std::string>& assignment = std::nullopt,
                   const EngineLimits& limits = {});

struct AssignmentStats {
  std::string assignment;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t total = 0;
  double avg_clauses = 0.0;
};

struct ClassifiedRecord {
  std::string student;
  std::string assignment;
  std::int64_t timestamp = 0;
  std::size_t tests_passed = 0;
  HistoryLabel label;
};

struct CorpusStats {
  std::vector<AssignmentStats> assignments;
  std::vector<ClassifiedRecord> classified;
  std::map<HistoryLabel, std::size_t> categories;
  std::size_t records = 0;
};

/// Correct means the pass-set equals the assignment's full set.
CorpusStats corpus_stats(const std::vector<SubmissionRecord>& records,
                         const std::map<std::string, PassSet>& full_sets);

/// Aligned columns: Assignment, Correct, Incorrect, Total, Avg. Clauses.
std::string render_stats_table(const CorpusStats& stats);
std::string render_category_table(const CorpusStats& stats);

}  // namespace prologian
