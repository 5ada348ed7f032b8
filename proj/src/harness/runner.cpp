#include "prologian/harness/runner.hpp"

#include <algorithm>
#include <map>
#include <thread>

#include "prologian/syntax/writer.hpp"

namespace prologian {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Error: return "Error";
    case Verdict::Diverged: return "Diverged";
  }
  return "?";
}

namespace {

int max_var_id(const Term& t) {
  int m = t.is_var() ? t.var_id : -1;
  for (const Term& a : t.args) m = std::max(m, max_var_id(a));
  return m;
}

bool mentions_var(const Term& t, int id) {
  if (t.is_var()) return t.var_id == id;
  for (const Term& a : t.args)
    if (mentions_var(a, id)) return true;
  return false;
}

bool mentions_any(const Term& t, const std::vector<Term>& goals) {
  for (const Term* v : variables_of(t))
    for (const Term& g : goals)
      if (mentions_var(g, v->var_id)) return true;
  return false;
}

/// A query whose first answer yields the value under test, plus the expectation.
struct Probe {
  Term query;
  Term actual_var;
  Term expected;
};

/// Splits the body into "compute" and "check" halves when it ends in an
/// equality assertion or a call whose last argument is the expected value.
std::optional<Probe> make_probe(const Term& body) {
  std::vector<Term> goals = flatten_conjunction(body);
  if (goals.empty()) return std::nullopt;
  Term last = goals.back();
  std::vector<Term> prefix(goals.begin(), goals.end() - 1);

  if (last.is_compound("==", 2) || last.is_compound("=", 2) || last.is_compound("=:=", 2)) {
    for (int side = 0; side < 2; ++side) {
      const Term& var = last.args[side];
      const Term& other = last.args[1 - side];
      if (var.is_var() && !prefix.empty() && mentions_any(var, prefix) && !mentions_any(other, prefix)) {
        Probe p{make_conjunction(prefix), var, other};
        return p;
      }
    }
    return std::nullopt;
  }
  if (!last.is_compound() || is_builtin(last.indicator()) || is_library_predicate(last.indicator()))
    return std::nullopt;
  const Term& expected = last.args.back();
  if (!expected.is_ground()) return std::nullopt;
  Term fresh = Term::var("$Actual", max_var_id(body) + 1);
  Term call = last;
  call.args.back() = fresh;
  prefix.push_back(call);
  return Probe{make_conjunction(prefix), fresh, expected};
}

std::string render_answer(const Answer& a) {
  std::string out;
  for (const auto& b : a.bindings) {
    if (b.value.is_var() && b.value.name == b.name) continue;
    if (!out.empty()) out += ", ";
    out += b.name + " = " + format_term(b.value);
  }
  return out.empty() ? "true" : out;
}

class CaseRunner {
 public:
  CaseRunner(const Program& program, const EngineLimits& limits, const RunOptions& options)
      : program_(program), limits_(limits), trace_(options.trace) {
    engine_options_.occurs_check = options.occurs_check;
    engine_options_.cancel = options.cancel;
  }

  TestResult run(const TestCase& tc, std::size_t index) {
    TestResult r;
    r.index = index;
    r.suite = tc.suite;
    r.name = tc.name;
    r.targets = tc.targets;
    EngineOptions traced = engine_options_;
    if (trace_) traced.trace = [this, id = tc.id()](const TraceEvent& ev) { trace_(id, ev); };
    Engine engine(program_, traced);
    try {
      if (tc.all_template) run_all(engine, tc, r);
      else run_default(engine, tc, r);
    } catch (const EngineError& e) {
      r.verdict = Verdict::Error;
      r.error = e.error();
      r.steps_used = e.steps_used();
      r.message = e.error().str();
    } catch (const EngineCancelled&) {
      r.verdict = Verdict::Error;
      RuntimeError err;
      err.kind = RuntimeError::Kind::ResourceLimit;
      err.message = "time limit exceeded (possible infinite loop)";
      r.error = err;
      r.steps_used = engine.steps_used();
      r.message = err.message;
    }
    r.unknowns = engine.unknown_predicates();
    return r;
  }

 private:
  // Returns true when a limit ended the search; the verdict is then final.
  bool limit_verdict(const Engine& engine, TestResult& r) {
    if (engine.status() == SolveStatus::StepLimitReached) {
      r.verdict = Verdict::Diverged;
      r.call_chain = engine.limit_call_chain();
      r.message = "step limit of " + std::to_string(limits_.max_steps) + " reached";
      if (!r.call_chain.empty()) r.message += " in " + r.call_chain.back().str();
      return true;
    }
    if (engine.status() == SolveStatus::DepthLimitReached) {
      r.verdict = Verdict::Error;
      RuntimeError err;
      err.kind = RuntimeError::Kind::ResourceLimit;
      err.message = "call depth limit of " + std::to_string(limits_.max_depth) + " exceeded";
      err.call_chain = engine.limit_call_chain();
      r.error = err;
      r.call_chain = err.call_chain;
      r.message = err.message;
      return true;
    }
    return false;
  }

  void run_default(Engine& engine, const TestCase& tc, TestResult& r) {
    engine.start(tc.body, limits_);
    std::optional<Answer> first = engine.next();
    r.steps_used = engine.steps_used();
    if (!first && limit_verdict(engine, r)) return;

    if (tc.expect_fail) {
      r.verdict = first ? Verdict::Fail : Verdict::Pass;
      if (first) r.message = "test succeeded but was expected to fail";
      return;
    }
    if (first) {
      r.verdict = Verdict::Pass;
      if (first->open_alternatives && !tc.nondet) {
        r.open_choice_warning = true;
        r.second_answer = second_answer(tc);
      }
      return;
    }
    r.verdict = Verdict::Fail;
    r.message = "test goal failed";
    r.diff = failure_diff(tc);
  }

  void run_all(Engine& engine, const TestCase& tc, TestResult& r) {
    engine.start(tc.body, limits_);
    std::vector<Term> got;
    while (got.size() < limits_.max_solutions) {
      std::optional<Answer> a = engine.next();
      if (!a) break;
      got.push_back(a->substitution().apply(*tc.all_template));
    }
    r.steps_used = engine.steps_used();
    if (got.size() < limits_.max_solutions && limit_verdict(engine, r)) return;
    Term actual = Term::list(got);
    if (variant_equal(actual, *tc.all_expected)) {
      r.verdict = Verdict::Pass;
      return;
    }
    r.verdict = Verdict::Fail;
    r.message = "solutions differ from the expected list";
    r.diff = diff_outputs(*tc.all_expected, actual);
  }

  std::optional<AssertionDiff> failure_diff(const TestCase& tc) {
    std::optional<Probe> probe = make_probe(tc.body);
    if (!probe) return std::nullopt;
    Engine engine(program_, engine_options_);
    try {
      engine.start(probe->query, limits_);
      std::optional<Answer> a = engine.next();
      if (!a) {
        if (engine.status() != SolveStatus::Exhausted && engine.status() != SolveStatus::ChoicePointsRemain)
          return std::nullopt;
        return no_solution_diff(probe->expected);
      }
      Term actual = a->substitution().apply(probe->actual_var);
      AssertionDiff d = diff_outputs(probe->expected, actual);
      if (!d.diverges) return std::nullopt;
      return d;
    } catch (const EngineError&) {
      return std::nullopt;
    }
  }

  std::optional<std::string> second_answer(const TestCase& tc) {
    Term query = tc.body;
    if (std::optional<Probe> probe = make_probe(tc.body); probe && !probe->actual_var.name.starts_with("$"))
      query = probe->query;
    Engine engine(program_, engine_options_);
    try {
      engine.start(query, limits_);
      if (!engine.next()) return std::nullopt;
      std::optional<Answer> second = engine.next();
      if (!second) return std::nullopt;
      return render_answer(*second);
    } catch (const EngineError&) {
      return std::nullopt;
    }
  }

  const Program& program_;
  EngineLimits limits_;
  EngineOptions engine_options_;
  std::function<void(const std::string&, const TraceEvent&)> trace_;
};

}  // namespace

std::vector<TestResult> run_suite(const Program& submission, const TestFile& tests, const EngineLimits& limits,
                                  const RunOptions& options) {
  limits.validate();
  Program program = submission;
  program.append(tests.helpers);
  std::vector<TestResult> results(tests.cases.size());
  std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, tests.cases.size()));
  if (jobs == 1) {
    CaseRunner runner(program, limits, options);
    for (std::size_t i = 0; i < tests.cases.size(); ++i) results[i] = runner.run(tests.cases[i], i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      CaseRunner runner(program, limits, options);
      for (std::size_t i = next++; i < tests.cases.size(); i = next++) results[i] = runner.run(tests.cases[i], i);
    });
  }
  for (auto& t : workers) t.join();
  return results;
}

std::vector<RuntimeError> collect_unknowns(const std::vector<TestResult>& results) {
  std::map<PredicateIndicator, RuntimeError> by_pi;
  for (const auto& r : results)
    for (const auto& u : r.unknowns) by_pi.emplace(u.predicate, u);
  std::vector<RuntimeError> out;
  for (auto& [pi, err] : by_pi) out.push_back(err);
  return out;
}

}  // namespace prologian
