#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prologian/engine/engine.hpp"
#include "prologian/harness/diff.hpp"
#include "prologian/harness/test_file.hpp"

namespace prologian {

enum class Verdict : std::uint8_t { Pass, Fail, Error, Diverged };
std::string_view to_string(Verdict v);

struct TestResult {
  std::size_t index = 0;
  std::string suite;
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::optional<RuntimeError> error;
  std::optional<AssertionDiff> diff;
  /// Short explanation of a non-passing verdict.
  std::string message;
  bool open_choice_warning = false;
  /// The answer found on backtracking into the tested call, when one exists.
  std::optional<std::string> second_answer;
  std::uint64_t steps_used = 0;
  /// Call chain at the moment the step limit stopped a Diverged test.
  std::vector<PredicateIndicator> call_chain;
  std::vector<RuntimeError> unknowns;
  std::vector<PredicateIndicator> targets;

  std::string id() const { return suite + ":" + name; }
};

struct RunOptions {
  /// Worker threads; results are reassembled in declaration order.
  std::size_t jobs = 1;
  const std::atomic<bool>* cancel = nullptr;
  bool occurs_check = true;
  /// Receives engine events for each test's main query, tagged with the test id.
  std::function<void(const std::string&, const TraceEvent&)> trace;
};

/// Runs every case in a fresh engine over submission + helpers.
std::vector<TestResult> run_suite(const Program& submission, const TestFile& tests, const EngineLimits& limits,
                                  const RunOptions& options = {});

/// Unknown predicates across results, one per indicator, sorted.
std::vector<RuntimeError> collect_unknowns(const std::vector<TestResult>& results);

}  // namespace prologian
