#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "prologian/analytics/bug_classifier.hpp"
#include "prologian/analytics/corpus.hpp"
#include "prologian/analytics/history.hpp"
#include "prologian/analytics/program_diff.hpp"
#include "prologian/analytics/tree_diff.hpp"
#include "prologian/syntax/parser.hpp"
#include "prologian/syntax/writer.hpp"

using namespace prologian;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = fs::path(PROLOGIAN_TEST_DATA) / "fixtures";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE_MESSAGE(in.good(), p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

Program load(std::string_view src) {
  auto r = parse_program(src);
  REQUIRE(r.ok());
  return r.program;
}

std::vector<fs::path> bug_fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kFixtures / "bugs"))
    if (e.is_directory()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BugLabel> classify_sources(std::string_view old_src, std::string_view new_src) {
  Program o = load(old_src), n = load(new_src);
  return classify_bug(diff_programs(o, n), o, n);
}

bool has_label(const std::vector<BugLabel>& labels, BugType t, std::optional<BugSubtype> s) {
  return std::any_of(labels.begin(), labels.end(), [&](const BugLabel& l) { return l.type == t && l.subtype == s; });
}

const char* kMult =
    "mult([], _, []).\n"
    "mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).\n";

PassSet set_of(std::initializer_list<const char*> ids) {
  PassSet s;
  for (const char* id : ids) s.insert(id);
  return s;
}

}  // namespace

TEST_CASE("worked history sequence") {
  std::vector<PassSet> seq = {{}, set_of({"t1", "t2"}), set_of({"t1"}), set_of({"t1", "t3"}), set_of({"t1", "t3"})};
  auto labels = classify_history(seq, set_of({"t1", "t2", "t3"}));
  std::vector<Progress> got;
  for (const auto& l : labels) got.push_back(l.progress);
  // {t1} -> {t1,t3} is a strict superset, so consecutive comparison gives BugFixed.
  CHECK(got == std::vector<Progress>{Progress::FirstSubmission, Progress::BugFixed, Progress::BugIntroduced,
                                     Progress::BugFixed, Progress::NoChange});
  auto mixed = classify_history(std::vector<PassSet>{set_of({"t1", "t2"}), set_of({"t1", "t3"})},
                                set_of({"t1", "t2", "t3"}));
  CHECK(mixed[1].progress == Progress::Mixed);
  for (const auto& l : labels) CHECK_FALSE(l.correct);
}

TEST_CASE("history examples") {
  auto single = classify_history(std::vector<PassSet>{set_of({"a", "b"})}, set_of({"a", "b"}));
  REQUIRE(single.size() == 1);
  CHECK(single[0].progress == Progress::FirstSubmission);
  CHECK(single[0].correct);

  auto refactor = classify_history(std::vector<PassSet>{set_of({"t1"}), set_of({"t1"})}, set_of({"t1", "t2"}));
  CHECK(refactor[1].progress == Progress::NoChange);

  CHECK_THROWS_AS(classify_history(std::vector<PassSet>{}, {}), std::invalid_argument);
  SubmissionRecord a{"s", "x", 10, "", {}, 0}, b{"s", "x", 10, "", {}, 0};
  CHECK_THROWS_AS(classify_history(std::vector<SubmissionRecord>{a, b}, {}), std::invalid_argument);
}

TEST_CASE("history labels partition random pass-set pairs") {
  std::mt19937 rng(99);
  std::map<Progress, int> seen;
  for (int i = 0; i < 1000; ++i) {
    PassSet prev, cur;
    for (int t = 0; t < 5; ++t) {
      std::string id = "t" + std::to_string(t);
      if (rng() % 2) prev.insert(id);
      if (rng() % 2) cur.insert(id);
    }
    bool gained = std::any_of(cur.begin(), cur.end(), [&](const auto& x) { return !prev.count(x); });
    bool lost = std::any_of(prev.begin(), prev.end(), [&](const auto& x) { return !cur.count(x); });
    int applicable = (gained && !lost) + (!gained && lost) + (gained && lost) + (!gained && !lost);
    CHECK(applicable == 1);
    Progress expected = gained && lost ? Progress::Mixed
                        : gained       ? Progress::BugFixed
                        : lost         ? Progress::BugIntroduced
                                       : Progress::NoChange;
    Progress got = compare_pass_sets(prev, cur);
    CHECK(got == expected);
    ++seen[got];
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("tree edit distance") {
  CHECK(tree_edit_distance(parse_term("f(a,b)"), parse_term("f(a,b)")) == 0);
  CHECK(tree_edit_distance(parse_term("f(a,b)"), parse_term("f(a,c)")) == 1);
  CHECK(tree_edit_distance(parse_term("f(a)"), parse_term("f(a,b)")) == 1);
  CHECK(tree_edit_distance(parse_term("f(X)"), parse_term("g(X)")) == 1);

  std::mt19937 rng(8);
  const char* pool[] = {"f(a,b)", "f(g(a),b)", "g(a)", "[1,2,3]", "[1,3]", "h(X,Y,X)", "a", "f(b,a)"};
  for (const char* x : pool)
    for (const char* y : pool) {
      std::size_t d = tree_edit_distance(parse_term(x), parse_term(y));
      CHECK(d == tree_edit_distance(parse_term(y), parse_term(x)));
      CHECK((d == 0) == (std::string(x) == y));
      for (const char* z : pool)
        CHECK(d <= tree_edit_distance(parse_term(x), parse_term(z)) + tree_edit_distance(parse_term(z), parse_term(y)));
    }
}

TEST_CASE("minimum cost assignment matches brute force") {
  std::mt19937 rng(12);
  for (int round = 0; round < 200; ++round) {
    std::size_t n = 1 + rng() % 5;
    std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n));
    for (auto& row : cost)
      for (auto& c : row) c = static_cast<std::int64_t>(rng() % 50);
    auto assign = min_cost_assignment(cost);
    REQUIRE(assign.size() == n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    CHECK(std::is_permutation(assign.begin(), assign.end(), perm.begin()));
    std::int64_t got = 0;
    for (std::size_t i = 0; i < n; ++i) got += cost[i][assign[i]];
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    do {
      std::int64_t c = 0;
      for (std::size_t i = 0; i < n; ++i) c += cost[i][perm[i]];
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == best);
  }
}

TEST_CASE("program diff examples") {
  auto added = diff_sources("mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).\n", kMult);
  REQUIRE(added.size() == 1);
  CHECK(added[0].predicate.str() == "mult/3");
  CHECK(added[0].kind == DiffKind::Modified);
  REQUIRE(added[0].edits.size() == 1);
  CHECK(added[0].edits[0].kind == ClauseEditKind::ClauseAdded);

  auto renamed = diff_sources(
      "mult([], _, []).\nmult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, multiply(L1, N, L2).\n", kMult);
  REQUIRE(renamed.size() == 1);
  REQUIRE(renamed[0].edits.size() == 1);
  CHECK(renamed[0].edits[0].kind == ClauseEditKind::ClauseModified);
  REQUIRE(renamed[0].edits[0].script.size() == 1);
  const EditOp& op = renamed[0].edits[0].script[0];
  CHECK(op.kind == EditKind::Relabel);
  CHECK(op.old_pos->str() == "goal 2");
  CHECK(op.before->name == "multiply");
  CHECK(op.after->name == "mult");

  CHECK(diff_sources(kMult, kMult).empty());
  CHECK_THROWS_AS(diff_sources("p(.", kMult), DiffError);
}

TEST_CASE("renamed predicates are matched by name similarity") {
  auto d = diff_sources("lenght([], 0).\n", "length2([], 0).\n");
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == DiffKind::Modified);
  REQUIRE(d[0].renamed_from.has_value());
  CHECK(d[0].renamed_from->str() == "lenght/2");
  auto unrelated = diff_sources("foo(1).\n", "bar(1).\n");
  CHECK(unrelated.size() == 2);
}

TEST_CASE("diffs of a program against itself are empty") {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(kFixtures))
    if (e.path().extension() == ".pl") files.push_back(e.path());
  REQUIRE(files.size() > 30);
  for (const auto& f : files) {
    std::string src = slurp(f);
    auto parsed = parse_program(src);
    if (!parsed.ok()) continue;
    CHECK_MESSAGE(diff_programs(parsed.program, parsed.program).empty(), f.string());
  }
}

TEST_CASE("diff kinds are anti-symmetric") {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& dir : bug_fixtures()) pairs.push_back({slurp(dir / "old.pl"), slurp(dir / "new.pl")});
  pairs.push_back({"p(1).\nq(2).\n", "q(2).\nr(3) :- q(3).\n"});
  pairs.push_back({"a.\n", "a.\nzzz(1, 2).\n"});
  for (const auto& [a, b] : pairs) {
    auto fwd = diff_sources(a, b);
    auto back = diff_sources(b, a);
    auto flip = [](DiffKind k) {
      return k == DiffKind::Added ? DiffKind::Removed : k == DiffKind::Removed ? DiffKind::Added : k;
    };
    std::multiset<std::pair<std::string, int>> f, r;
    for (const auto& d : fwd) {
      std::string name = d.renamed_from ? d.renamed_from->str() + ">" + d.predicate.str() : d.predicate.str();
      f.insert({d.kind == DiffKind::Modified && d.renamed_from ? "rename" : name, int(flip(d.kind))});
    }
    for (const auto& d : back) {
      std::string name = d.renamed_from ? d.renamed_from->str() + ">" + d.predicate.str() : d.predicate.str();
      r.insert({d.kind == DiffKind::Modified && d.renamed_from ? "rename" : name, int(d.kind)});
    }
    CHECK_MESSAGE(f == r, a << "\n---\n" << b);
  }
}

TEST_CASE("edit scripts address real subterms") {
  for (const auto& dir : bug_fixtures()) {
    auto diffs = diff_sources(slurp(dir / "old.pl"), slurp(dir / "new.pl"));
    for (const auto& d : diffs) {
      if (d.kind == DiffKind::Modified) CHECK(!d.edits.empty());
      for (const auto& e : d.edits) {
        if (e.kind != ClauseEditKind::ClauseModified) continue;
        CHECK_FALSE(e.script.empty());
        for (const auto& op : e.script) {
          if (op.old_pos) CHECK(term_at(*e.old_clause, *op.old_pos) != nullptr);
          if (op.new_pos) CHECK(term_at(*e.new_clause, *op.new_pos) != nullptr);
        }
      }
    }
  }
}

TEST_CASE("bug fixtures reproduce their printed types") {
  auto dirs = bug_fixtures();
  REQUIRE(dirs.size() == 8);
  for (const auto& dir : dirs) {
    auto labels = classify_sources(slurp(dir / "old.pl"), slurp(dir / "new.pl"));
    REQUIRE_FALSE(labels.empty());
    std::string expected = trim(slurp(dir / "expected.txt"));
    CHECK_MESSAGE(std::string(to_string(labels[0].type)) == expected, dir.filename().string());
    CHECK(bug_types(labels).size() == 1);
  }
}

TEST_CASE("classification examples with subtypes") {
  const char* nobase = "mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).\n";
  CHECK(has_label(classify_sources(nobase, kMult), BugType::Incomplete, BugSubtype::MissingClause));
  const char* wrongarg = "mult([], _, []).\nmult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L1).\n";
  CHECK(has_label(classify_sources(wrongarg, kMult), BugType::WrongArgument, BugSubtype::OtherSubtype));
  CHECK(has_label(classify_sources("max(X, Y, X) :- X >= Y.\nmax(_, Y, Y).\n",
                                   "max(X, Y, X) :- X >= Y, !.\nmax(_, Y, Y).\n"),
                  BugType::CutProblem, BugSubtype::MissingCut));
  CHECK(has_label(classify_sources("max(X, Y, X) :- !, X >= Y.\nmax(_, Y, Y).\n",
                                   "max(X, Y, X) :- X >= Y, !.\nmax(_, Y, Y).\n"),
                  BugType::CutProblem, BugSubtype::WrongPlacement));
  CHECK(has_label(classify_sources("max(X, Y, X) :- X >= Y, !, !.\nmax(_, Y, Y).\n",
                                   "max(X, Y, X) :- X >= Y, !.\nmax(_, Y, Y).\n"),
                  BugType::CutProblem, BugSubtype::ExtraCut));
  CHECK(has_label(classify_sources("p(X) :- q(X).\nq(1).\n", "p(X) :- \\+ q(X).\nq(1).\n"), BugType::OperatorError,
                  BugSubtype::MissingNegation));
  CHECK(has_label(classify_sources("p(X, Y) :- X < Y.\n", "p(X, Y) :- X =< Y.\n"), BugType::OperatorError,
                  BugSubtype::WrongOperator));
  CHECK(has_label(classify_sources("p([X, Xs]) :- q(X, Xs).\nq(_, _).\n", "p([X | Xs]) :- q(X, Xs).\nq(_, _).\n"),
                  BugType::OperatorError, BugSubtype::ListTerminatorsIssue));
  CHECK(has_label(classify_sources("p(X, Y) :- q(Y, X).\nq(_, _).\n", "p(X, Y) :- q(X, Y).\nq(_, _).\n"),
                  BugType::WrongArgument, BugSubtype::ArgumentOrderSwap));
  CHECK(has_label(classify_sources("p(X) :- q(X).\nq(_, _).\n", "p(X) :- q(X, 1).\nq(_, _).\n"),
                  BugType::WrongArgument, BugSubtype::MissingArgument));
  CHECK(has_label(classify_sources("p(X) :- q(X), r(X).\nq(_).\nr(_).\n", "p(X) :- r(X), q(X).\nq(_).\nr(_).\n"),
                  BugType::RuleGoalProblems, BugSubtype::GoalOrderSwap));
  CHECK(has_label(classify_sources("p(X) :- q(X), r(X).\nq(_).\nr(_).\n", "p(X) :- q(X).\nq(_).\nr(_).\n"),
                  BugType::RuleGoalProblems, BugSubtype::ExtraGoal));
  CHECK(has_label(classify_sources("p(a).\n", "p(b).\n"), BugType::WrongVariableConstant, BugSubtype::WrongConstant));
  CHECK_THROWS_AS(classify_bug({}, load(kMult), load(kMult)), std::invalid_argument);
}

TEST_CASE("random program mutations get legal labels") {
  std::mt19937 rng(31);
  const std::vector<std::string> bodies = {"E2 is E1 * N", "mult(L1, N, L2)", "N > 0", "!", "\\+ E1 = N"};
  auto make = [&](std::vector<std::string> goals, std::string head) {
    std::string body;
    for (std::size_t i = 0; i < goals.size(); ++i) body += (i ? ", " : "") + goals[i];
    return "mult([], _, []).\n" + head + (body.empty() ? ".\n" : " :- " + body + ".\n");
  };
  const std::vector<std::string> heads = {"mult([E1 | L1], N, [E2 | L2])", "mult([E1, L1], N, [E2 | L2])",
                                          "mult([E1 | L1], M, [E2 | L2])", "mult([E1 | L1], [E2 | L2], N)"};
  std::string base = make({bodies[0], bodies[1]}, heads[0]);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> goals;
    for (std::size_t n = rng() % 4; n > 0; --n) goals.push_back(bodies[rng() % bodies.size()]);
    std::string mutated = make(goals, heads[rng() % heads.size()]);
    Program o = load(mutated), n = load(base);
    auto diff = diff_programs(o, n);
    if (diff.empty()) continue;
    auto labels = classify_bug(diff, o, n);
    CHECK_FALSE(labels.empty());
    for (const auto& l : labels)
      if (l.subtype) CHECK_MESSAGE(subtype_allowed(l.type, *l.subtype), l.str() << "\n" << mutated);
  }
}

TEST_CASE("corpus statistics are conserved") {
  Corpus corpus = load_corpus(kFixtures / "corpus");
  REQUIRE(corpus.records.size() == 30);
  CHECK(corpus.full_sets.size() == 2);
  CorpusStats stats = corpus_stats(corpus.records, corpus.full_sets);
  CHECK(stats.records == 30);
  std::size_t sum = 0;
  for (const auto& [label, n] : stats.categories) sum += n;
  CHECK(sum == 30);
  std::size_t totals = 0;
  for (const auto& a : stats.assignments) {
    CHECK(a.total == a.correct + a.incorrect);
    totals += a.total;
  }
  CHECK(totals == 30);
  std::size_t firsts = 0;
  for (const auto& [label, n] : stats.categories)
    if (label.progress == Progress::FirstSubmission) firsts += n;
  CHECK(firsts == 11);
  CHECK(render_stats_table(stats).find("All") != std::string::npos);
}

TEST_CASE("corpus statistics examples") {
  std::vector<SubmissionRecord> recs;
  PassSet full = set_of({"t"});
  for (int i = 0; i < 5; ++i) {
    SubmissionRecord r;
    r.student = "s" + std::to_string(i);
    r.assignment = "a";
    r.timestamp = 100 + i;
    r.passed = i < 2 ? full : PassSet{};
    r.clause_count = i % 2 ? 4 : 3;
    recs.push_back(r);
  }
  CorpusStats stats = corpus_stats(recs, {{"a", full}});
  REQUIRE(stats.assignments.size() == 1);
  CHECK(stats.assignments[0].correct == 2);
  CHECK(stats.assignments[0].incorrect == 3);
  CHECK(stats.assignments[0].total == 5);
  CHECK(stats.assignments[0].avg_clauses == doctest::Approx(3.4));

  std::vector<SubmissionRecord> two = {recs[0], recs[1]};
  two[0].clause_count = 3;
  two[1].clause_count = 4;
  CHECK(corpus_stats(two, {{"a", full}}).assignments[0].avg_clauses == doctest::Approx(3.5));
}

TEST_CASE("corpus loading errors") {
  fs::path tmp = fs::temp_directory_path() / ("prologian-corpus-" + std::to_string(::getpid()));
  fs::create_directories(tmp / "a" / "s");
  std::ofstream(tmp / "a" / "tests.plt") << ":- begin_tests(x).\ntest(t) :- true.\n:- end_tests(x).\n";
  std::ofstream(tmp / "a" / "s" / "notanumber.pl") << "p.\n";
  CHECK_THROWS_AS(load_corpus(tmp), CorpusError);
  fs::remove_all(tmp);
}
