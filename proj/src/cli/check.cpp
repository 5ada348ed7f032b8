#include <sys/stat.h>

#include <condition_variable>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include "common.hpp"
#include "prologian/analyzers/call_graph.hpp"
#include "prologian/analyzers/solution_type.hpp"
#include "prologian/analyzers/suggest.hpp"
#include "prologian/analyzers/warnings.hpp"
#include "prologian/harness/runner.hpp"
#include "prologian/scoring/assignment.hpp"
#include "prologian/scoring/report.hpp"
#include "prologian/scoring/scorecard.hpp"
#include "prologian/syntax/parser.hpp"

namespace prologian::cli {

namespace {

std::int64_t submission_time(const CheckOptions& o) {
  if (o.timestamp) return *o.timestamp;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
  }
  struct stat st {};
  if (::stat(o.program.c_str(), &st) == 0) return static_cast<std::int64_t>(st.st_mtime);
  return 0;
}

// Raises `flag` once `seconds` pass, unless stopped first.
class Watchdog {
 public:
  Watchdog(std::atomic<bool>& flag, unsigned seconds)
      : thread_([this, &flag, seconds] {
          std::unique_lock lock(mutex_);
          if (!cv_.wait_for(lock, std::chrono::seconds(seconds), [this] { return stopped_; })) flag = true;
        }) {}
  ~Watchdog() {
    {
      std::lock_guard lock(mutex_);
      stopped_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopped_ = false;
  std::thread thread_;
};

const char* port_name(TracePort p) {
  switch (p) {
    case TracePort::Call: return "Call";
    case TracePort::Exit: return "Exit";
    case TracePort::Fail: return "Fail";
    case TracePort::Redo: return "Redo";
  }
  return "?";
}

std::string summary(const nlohmann::ordered_json& doc) {
  std::string out = "Assignment " + doc["assignment"].get<std::string>() + ", submission " +
                    doc["submission"].get<std::string>() + "\n";
  for (const auto& t : doc["tests"]) {
    std::string verdict = t["verdict"].get<std::string>();
    out += "  " + verdict + std::string(9 - std::min<std::size_t>(verdict.size(), 8), ' ') + t["id"].get<std::string>();
    if (!t["message"].get<std::string>().empty()) out += "  (" + t["message"].get<std::string>() + ")";
    out += "\n";
  }
  for (const auto& w : doc["warnings"])
    out += "  warning: " + w["message"].get<std::string>() + "\n";
  const auto& sc = doc["scorecard"];
  out += std::to_string(doc["syntax_errors"].size()) + " syntax error(s), " + std::to_string(doc["warnings"].size()) +
         " warning(s)\n";
  out += "Score: " + std::to_string(sc["total_points"].get<unsigned>()) + "/" +
         std::to_string(sc["max_points"].get<unsigned>()) + " points, " +
         std::to_string(sc["tests_passed"].get<std::size_t>()) + "/" +
         std::to_string(sc["tests_total"].get<std::size_t>()) + " tests passed\n";
  return out;
}

}  // namespace

int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream& err) {
  std::string source;
  AssignmentSpec spec;
  TestFile tests;
  try {
    source = read_text(o.program);
    spec = load_assignment_spec(o.spec);
    std::string test_source = read_text(o.tests);
    tests = parse_test_file(test_source);
    if (!tests.ok()) {
      err << "prologian: " << o.tests.string() << " is malformed\n" << render_errors(test_source, tests.errors);
      return kInputError;
    }
    validate_against_tests(spec, tests);
    if (o.max_steps) spec.limits.max_steps = *o.max_steps;
    if (o.report_dir) std::filesystem::create_directories(*o.report_dir);
  } catch (const InputError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  } catch (const SpecError& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  }

  ParseResult parsed = parse_program(source);
  if (!parsed.errors.empty()) err << render_errors(source, parsed.errors, RenderOptions{use_color(o.color)});

  std::atomic<bool> cancel{false};
  RunOptions run_options;
  run_options.jobs = o.trace ? 1 : o.jobs;
  run_options.cancel = &cancel;
  if (o.trace)
    run_options.trace = [&err](const std::string& id, const TraceEvent& ev) {
      err << "[" << id << "] " << std::string(ev.depth * 2, ' ') << port_name(ev.port) << ": " << ev.goal << "\n";
    };
  std::vector<TestResult> results;
  {
    Watchdog watchdog(cancel, o.timeout_seconds);
    results = run_suite(parsed.program, tests, spec.limits, run_options);
  }
  if (cancel) err << "prologian: time limit of " << o.timeout_seconds << " s exceeded (possible infinite loop)\n";

  Program combined = parsed.program;
  combined.append(tests.helpers);
  std::vector<RuntimeError> unknowns = collect_unknowns(results);
  std::set<PredicateIndicator> pool = suggestion_pool(combined);

  CallGraph graph = build_call_graph(parsed.program);
  std::vector<SolutionTypeVerdict> verdicts;
  std::vector<TechniqueRequirement> requirements;
  for (const auto& p : spec.predicates) {
    if (!p.technique) continue;
    requirements.push_back({p.predicate, *p.technique});
    if (graph.is_user(p.predicate)) verdicts.push_back(classify_solution_type(graph, p.predicate));
  }
  std::vector<TechniqueViolation> violations = check_required_technique(verdicts, requirements);
  std::vector<Warning> warnings = synthesize_warnings(results, unknowns, pool, violations);

  ReportInput in;
  in.submission = o.program.filename().string();
  in.source = source;
  in.syntax_errors = parsed.errors;
  in.cases = tests.cases;
  in.results = results;
  in.warnings = warnings;
  in.verdicts = verdicts;
  in.requirements = requirements;
  in.violations = violations;
  in.scorecard = score_submission(results, spec, warnings.size(), submission_time(o));
  in.reveal_bodies = spec.reveal_bodies;
  Report report = render_report(in);

  try {
    if (o.report_dir) {
      write_text(*o.report_dir / "report.md", report.markdown);
      write_text(*o.report_dir / "report.json", report.json);
      write_text(*o.report_dir / "scorecard.json", scorecard_to_json(in.scorecard));
    }
  } catch (const std::exception& e) {
    err << "prologian: " << e.what() << "\n";
    return kInputError;
  }
  out << (o.json ? report.json : summary(report.document));

  bool clean = parsed.errors.empty() && warnings.empty() &&
               std::all_of(results.begin(), results.end(), [](const TestResult& r) { return r.verdict == Verdict::Pass; });
  return clean ? kPassed : kFailures;
}

}  // namespace prologian::cli
