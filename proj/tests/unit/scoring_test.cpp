#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <thread>

#include "prologian/analyzers/call_graph.hpp"
#include "prologian/analyzers/warnings.hpp"
#include "prologian/harness/runner.hpp"
#include "prologian/harness/test_file.hpp"
#include "prologian/scoring/assignment.hpp"
#include "prologian/scoring/leaderboard.hpp"
#include "prologian/scoring/report.hpp"
#include "prologian/scoring/scorecard.hpp"
#include "prologian/syntax/parser.hpp"

using namespace prologian;
namespace fs = std::filesystem;

namespace {

const char* kSpec = R"({
  "assignment": "lists-1",
  "predicates": [
    {"name": "mult", "arity": 3, "points": 10, "technique": "recursive"},
    {"name": "max", "arity": 3, "points": 5}
  ]
})";

TestResult result(std::string suite, std::string name, Verdict v) {
  TestResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.verdict = v;
  return r;
}

std::vector<TestResult> mult_max(Verdict m1, Verdict m2, Verdict m3, Verdict x1, Verdict x2) {
  return {result("mult", "a", m1), result("mult", "b", m2), result("mult", "c", m3), result("max", "a", x1),
          result("max", "b", x2)};
}

std::string spec_error(std::string_view json) {
  try {
    parse_assignment_spec(json);
  } catch (const SpecError& e) {
    return e.what();
  }
  return "";
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("prologian-scoring-" + std::to_string(std::random_device{}()) + "-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("assignment spec parsing") {
  AssignmentSpec spec = parse_assignment_spec(kSpec);
  CHECK(spec.assignment == "lists-1");
  REQUIRE(spec.predicates.size() == 2);
  CHECK(spec.predicates[0].predicate.str() == "mult/3");
  CHECK(spec.predicates[0].suite == "mult");
  CHECK(spec.predicates[0].technique == Technique::Recursive);
  CHECK_FALSE(spec.predicates[1].technique.has_value());
  CHECK(spec.find_suite("max") == &spec.predicates[1]);
  CHECK(spec.find_suite("other") == nullptr);
  CHECK(spec.reveal_bodies);
  CHECK(parse_assignment_spec(to_json(spec)).predicates.size() == 2);
}

TEST_CASE("assignment spec errors") {
  CHECK(spec_error("[1]") == "assignment spec must be a JSON object");
  CHECK(spec_error(R"({"assignment":"a","predicates":[{"name":"p","arity":1,"points":1},{"name":"p","arity":1,"points":2}]})")
            .find("duplicate predicate p/1") != std::string::npos);
  CHECK(spec_error(R"({"assignment":"a","predicates":[{"name":"p","arity":1,"points":1,"suite":"s"},{"name":"q","arity":1,"points":2,"suite":"s"}]})")
            .find("suite 's' is attributed to more than one predicate") != std::string::npos);
  CHECK(spec_error(R"({"assignment":"a","predicates":[{"name":"p","arity":1,"points":-1}]})")
            .find("points must be non-negative") != std::string::npos);
  CHECK(spec_error(R"({"assignment":"a","predicates":[{"name":"p","arity":1,"points":1,"technique":"magic"}]})")
            .find("unknown technique 'magic'") != std::string::npos);
  CHECK(spec_error(R"({"assignment":"a","predicates":[],"limits":{"max_steps":0}})") ==
        "limits.max_steps must be a positive integer");
}

TEST_CASE("specs are validated against the test file") {
  AssignmentSpec spec = parse_assignment_spec(kSpec);
  TestFile only_mult = parse_test_file(":- begin_tests(mult).\ntest(a) :- true.\n:- end_tests(mult).\n");
  CHECK_THROWS_WITH_AS(validate_against_tests(spec, only_mult), "suite 'max' for max/3 is missing from the tests",
                       SpecError);
  TestFile both = parse_test_file(
      ":- begin_tests(mult).\ntest(a) :- true.\n:- end_tests(mult).\n"
      ":- begin_tests(max).\ntest(a) :- true.\n:- end_tests(max).\n");
  CHECK_NOTHROW(validate_against_tests(spec, both));
}

TEST_CASE("scoring examples") {
  AssignmentSpec spec = parse_assignment_spec(kSpec);
  using V = Verdict;
  Scorecard one_max_fails = score_submission(mult_max(V::Pass, V::Pass, V::Pass, V::Pass, V::Fail), spec);
  CHECK(one_max_fails.total_points == 10);
  CHECK(one_max_fails.max_points == 15);
  CHECK(one_max_fails.tests_passed == 4);
  CHECK(one_max_fails.tests_total == 5);
  CHECK(one_max_fails.predicates[1].points_awarded == 0);

  CHECK(score_submission(mult_max(V::Fail, V::Error, V::Diverged, V::Fail, V::Fail), spec).total_points == 0);
  CHECK(score_submission(mult_max(V::Pass, V::Pass, V::Pass, V::Pass, V::Pass), spec).total_points == 15);
}

TEST_CASE("unattributed tests count toward totals only") {
  AssignmentSpec spec = parse_assignment_spec(kSpec);
  auto results = mult_max(Verdict::Pass, Verdict::Pass, Verdict::Pass, Verdict::Pass, Verdict::Pass);
  results.push_back(result("extra", "x", Verdict::Pass));
  Scorecard card = score_submission(results, spec);
  CHECK(card.tests_total == 6);
  CHECK(card.total_points == 15);
}

TEST_CASE("a spec suite without results is an error") {
  AssignmentSpec spec = parse_assignment_spec(kSpec);
  CHECK_THROWS_AS(score_submission({result("mult", "a", Verdict::Pass)}, spec), SpecError);
}

TEST_CASE("scorecards round-trip through JSON") {
  AssignmentSpec spec = parse_assignment_spec(kSpec);
  Scorecard card =
      score_submission(mult_max(Verdict::Pass, Verdict::Pass, Verdict::Pass, Verdict::Fail, Verdict::Pass), spec, 2,
                       1'700'000'000);
  Scorecard back = scorecard_from_json(scorecard_to_json(card));
  CHECK(back.total_points == card.total_points);
  CHECK(back.tests_passed == card.tests_passed);
  CHECK(back.warnings == 2);
  CHECK(back.timestamp == 1'700'000'000);
  REQUIRE(back.predicates.size() == 2);
  CHECK(back.predicates[1].predicate.str() == "max/3");
  CHECK(scorecard_to_json(back) == scorecard_to_json(card));
  CHECK(format_timestamp(1'700'000'000) == "2023-11-14T22:13:20Z");
}

TEST_CASE("score monotonicity over random result supersets") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 1000; ++round) {
    AssignmentSpec spec;
    spec.assignment = "random";
    std::vector<TestResult> sub;
    int preds = 1 + static_cast<int>(rng() % 4);
    for (int p = 0; p < preds; ++p) {
      PredicateSpec ps;
      ps.predicate = {"p" + std::to_string(p), 1};
      ps.suite = ps.predicate.name;
      ps.points = rng() % 20;
      spec.predicates.push_back(ps);
      for (int t = 1 + static_cast<int>(rng() % 4); t > 0; --t)
        sub.push_back(result(ps.suite, "t" + std::to_string(t), rng() % 2 ? Verdict::Pass : Verdict::Fail));
    }
    std::vector<TestResult> super = sub;
    for (auto& r : super)
      if (rng() % 3 == 0) r.verdict = Verdict::Pass;
    CHECK(score_submission(super, spec).total_points >= score_submission(sub, spec).total_points);
  }
}

TEST_CASE("leaderboard examples") {
  Leaderboard b = update_leaderboard({}, {"s1", 10, 5, 100});
  REQUIRE(b.size() == 1);
  b = update_leaderboard(b, {"s1", 10, 5, 200});
  CHECK(b[0].timestamp == 100);
  b = update_leaderboard(b, {"s2", 12, 1, 300});
  CHECK(b[0].student == "s2");
  b = update_leaderboard(b, {"s1", 10, 6, 400});
  CHECK(b[1].tests_passed == 6);
  CHECK(b[1].timestamp == 400);
  b = update_leaderboard(b, {"s1", 9, 9, 500});
  CHECK(b[1].points == 10);
}

TEST_CASE("leaderboard ordering breaks ties by tests, time and student") {
  Leaderboard b;
  b = update_leaderboard(b, {"c", 5, 3, 10});
  b = update_leaderboard(b, {"b", 5, 3, 10});
  b = update_leaderboard(b, {"a", 5, 3, 20});
  b = update_leaderboard(b, {"d", 5, 4, 30});
  std::vector<std::string> order;
  for (const auto& e : b) order.push_back(e.student);
  CHECK(order == std::vector<std::string>{"d", "b", "c", "a"});
}

TEST_CASE("leaderboard serialization and validation") {
  Leaderboard b = update_leaderboard(update_leaderboard({}, {"s1", 10, 5, 100}), {"s2", 3, 1, 50});
  CHECK(parse_leaderboard(serialize_leaderboard(b)) == b);
  CHECK_THROWS_AS(parse_leaderboard("{"), LeaderboardError);
  CHECK_THROWS_AS(parse_leaderboard(R"([{"student":"a"}])"), LeaderboardError);
  CHECK_THROWS_AS(parse_leaderboard(
                      R"([{"student":"a","points":1,"tests_passed":1,"timestamp":1},{"student":"a","points":2,"tests_passed":1,"timestamp":1}])"),
                  LeaderboardError);
  std::string table = render_leaderboard(b);
  CHECK(table.find("Rank") != std::string::npos);
  CHECK(table.find("s1") < table.find("s2"));
}

TEST_CASE("leaderboard files are updated under a lock") {
  TempDir dir;
  fs::path board = dir.path / "board.json";
  CHECK(load_leaderboard(board).empty());
  add_to_leaderboard(board, {"s1", 10, 5, 100});
  add_to_leaderboard(board, {"s2", 12, 5, 100});
  Leaderboard b = load_leaderboard(board);
  REQUIRE(b.size() == 2);
  CHECK(b[0].student == "s2");
  CHECK_FALSE(fs::exists(dir.path / "board.json.lock"));

  auto before = fs::last_write_time(board);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  add_to_leaderboard(board, {"s1", 1, 1, 999});
  CHECK(fs::last_write_time(board) == before);

  {
    LeaderboardLock held(board, std::chrono::milliseconds(100));
    CHECK_THROWS_AS(add_to_leaderboard(board, {"s3", 1, 1, 1}, std::chrono::milliseconds(50)), LockTimeout);
  }
  CHECK_NOTHROW(add_to_leaderboard(board, {"s3", 1, 1, 1}, std::chrono::milliseconds(50)));
}

TEST_CASE("concurrent additions are all kept") {
  TempDir dir;
  fs::path board = dir.path / "board.json";
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&, i] { add_to_leaderboard(board, {"s" + std::to_string(i), unsigned(i), 1, i}); });
  for (auto& t : threads) t.join();
  CHECK(load_leaderboard(board).size() == 8);
}

namespace {

Report build_report(std::string_view program_src, std::string_view tests_src, const AssignmentSpec& spec) {
  ReportInput in;
  in.submission = "sub.pl";
  in.source = std::string(program_src);
  ParseResult parsed = parse_program(program_src);
  in.syntax_errors = parsed.errors;
  TestFile tf = parse_test_file(tests_src);
  REQUIRE(tf.ok());
  in.cases = tf.cases;
  in.results = run_suite(parsed.program, tf, spec.limits);
  auto unknowns = collect_unknowns(in.results);
  std::set<PredicateIndicator> defined;
  for (const auto& p : parsed.program.predicates()) defined.insert(p);
  in.warnings = synthesize_warnings(in.results, unknowns, defined);
  in.scorecard = score_submission(in.results, spec, in.warnings.size(), 1'700'000'000);
  in.reveal_bodies = spec.reveal_bodies;
  return render_report(in);
}

const char* kMultTests =
    ":- begin_tests(mult).\n"
    "test(basic) :- mult([1,2],3,[3,6]).\n"
    "test(empty) :- mult([],5,[]).\n"
    ":- end_tests(mult).\n";

AssignmentSpec mult_spec() {
  return parse_assignment_spec(R"({"assignment":"a","predicates":[{"name":"mult","arity":3,"points":10}],
                                   "limits":{"max_steps":10000}})");
}

}  // namespace

TEST_CASE("clean submission reports all passes and no warnings") {
  Report r = build_report("mult([], _, []).\nmult([E1|L1], N, [E2|L2]) :- E2 is E1 * N, mult(L1, N, L2).\n", kMultTests,
                          mult_spec());
  CHECK(r.document["warnings"].empty());
  CHECK(r.document["scorecard"]["total_points"] == 10);
  for (const auto& t : r.document["tests"]) CHECK(t["verdict"] == "Pass");
  CHECK(r.markdown.find("Warnings") != std::string::npos);
}

TEST_CASE("syntax errors come first and the rest is still scored") {
  Report r = build_report(
      "mult([], _, []).\nmult([E1|L1], N, [E2|L2]) :- E2 is E1 * N, mult(L1, N, L2).\nbroken(X :- .\n", kMultTests,
      mult_spec());
  REQUIRE(r.document["syntax_errors"].size() == 1);
  CHECK(r.document["scorecard"]["total_points"] == 10);
  std::size_t syntax = r.markdown.find("## Syntax errors");
  std::size_t tests = r.markdown.find("## Test results");
  REQUIRE(syntax != std::string::npos);
  REQUIRE(tests != std::string::npos);
  CHECK(syntax < tests);
}

TEST_CASE("section order is fixed") {
  Report r = build_report("mult(_, _, _) :- mult(_, _, _).\n", kMultTests, mult_spec());
  std::vector<std::string> sections = {"## Syntax errors", "## Test results", "## Differences", "## Warnings",
                                       "## Technique", "## Scorecard"};
  std::size_t last = 0;
  for (const auto& s : sections) {
    std::size_t at = r.markdown.find(s);
    REQUIRE_MESSAGE(at != std::string::npos, s);
    CHECK(at >= last);
    last = at;
  }
}

TEST_CASE("diverging tests produce a possible infinite loop line") {
  Report r = build_report("mult(A, B, C) :- mult(A, B, C).\n", kMultTests, mult_spec());
  CHECK(r.markdown.find("possible infinite loop in mult/3") != std::string::npos);
  CHECK(r.document["tests"][0]["verdict"] == "Diverged");
}

TEST_CASE("bodies of failing tests are shown only when revealed") {
  AssignmentSpec hidden = mult_spec();
  hidden.reveal_bodies = false;
  const char* wrong = "mult([], _, []).\nmult([E1|L1], N, [E2|L2]) :- E2 is E1 + N, mult(L1, N, L2).\n";
  Report shown = build_report(wrong, kMultTests, mult_spec());
  Report not_shown = build_report(wrong, kMultTests, hidden);
  CHECK(shown.markdown.find("test(basic) :- mult([1,2],3,[3,6]).") != std::string::npos);
  CHECK(not_shown.markdown.find("test(basic) :- mult([1,2],3,[3,6]).") == std::string::npos);
}

TEST_CASE("reports are deterministic and the JSON mirrors the document") {
  const char* wrong = "mult([], _, []).\nmult([E1|L1], N, [E2|L2]) :- E2 is E1 + N, mult(L1, N, L2).\n";
  Report a = build_report(wrong, kMultTests, mult_spec());
  Report b = build_report(wrong, kMultTests, mult_spec());
  CHECK(a.markdown == b.markdown);
  CHECK(a.json == b.json);
  CHECK(nlohmann::ordered_json::parse(a.json) == a.document);
  CHECK(render_markdown(a.document) == a.markdown);
  CHECK(a.document["schema_version"] == kReportSchemaVersion);
}
