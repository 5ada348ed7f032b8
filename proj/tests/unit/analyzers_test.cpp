#include <doctest.h>

#include <algorithm>
#include <random>

#include "prologian/analyzers/call_graph.hpp"
#include "prologian/analyzers/solution_type.hpp"
#include "prologian/analyzers/suggest.hpp"
#include "prologian/analyzers/warnings.hpp"
#include "prologian/syntax/parser.hpp"

using namespace prologian;

namespace {

const char* kMult =
    "mult([], _, []).\n"
    "mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).\n";

Program load(std::string_view src) {
  auto r = parse_program(src);
  REQUIRE(r.ok());
  return r.program;
}

PredicateIndicator pi(std::string name, std::size_t arity) { return {std::move(name), arity}; }

std::size_t naive_distance(std::string_view a, std::string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::size_t sub = naive_distance(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
  std::size_t del = naive_distance(a.substr(1), b) + 1;
  std::size_t ins = naive_distance(a, b.substr(1)) + 1;
  return std::min({sub, del, ins});
}

std::vector<std::pair<PredicateIndicator, bool>> edge_set(const CallGraph& g) {
  std::vector<std::pair<PredicateIndicator, bool>> out;
  for (const auto& e : g.edges) out.push_back({e.callee, e.meta});
  return out;
}

}  // namespace

TEST_CASE("edit distance examples") {
  CHECK(levenshtein("multiply", "mult") == 4);
  CHECK(levenshtein("lenght", "length") == 2);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("edit distance matches a brute-force recursion and is symmetric") {
  std::mt19937 rng(5);
  auto word = [&] {
    std::string s;
    for (std::size_t n = rng() % 7; n > 0; --n) s += static_cast<char>('a' + rng() % 3);
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    std::string a = word(), b = word();
    CHECK(levenshtein(a, b) == naive_distance(a, b));
    CHECK(levenshtein(a, b) == levenshtein(b, a));
    CHECK(levenshtein(a, a) == 0);
  }
}

TEST_CASE("suggestion examples") {
  Suggestion s = suggest_predicates(pi("multiply", 3), {pi("mult", 3), pi("append", 3)});
  REQUIRE(s.candidates.size() == 1);
  CHECK(s.candidates[0].predicate == pi("mult", 3));
  CHECK(s.candidates[0].distance == 4);

  Suggestion l = suggest_predicates(pi("lenght", 2), {pi("length", 2), pi("last", 2)});
  REQUIRE_FALSE(l.candidates.empty());
  CHECK(l.candidates[0].predicate == pi("length", 2));
  CHECK(l.candidates[0].distance == 2);

  CHECK(suggest_predicates(pi("foo", 1), {pi("bar", 2)}).candidates.empty());
}

TEST_CASE("suggestions are ranked, bounded and exclude the unknown itself") {
  std::set<PredicateIndicator> defined = {pi("ab", 1), pi("ac", 1), pi("ad", 1), pi("aa", 1), pi("a", 1), pi("x", 2)};
  Suggestion s = suggest_predicates(pi("a", 1), defined);
  CHECK(s.candidates.size() == kMaxSuggestions);
  for (const auto& c : s.candidates) CHECK(c.predicate != pi("a", 1));
  CHECK(std::is_sorted(s.candidates.begin(), s.candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.distance, x.predicate.name) < std::tie(y.distance, y.predicate.name);
  }));
  CHECK(s.candidates[0].predicate == pi("aa", 1));
}

TEST_CASE("arity mismatch requires distance at most one") {
  CHECK(suggest_predicates(pi("mult", 2), {pi("mult", 3)}).candidates.size() == 1);
  CHECK(suggest_predicates(pi("mul", 2), {pi("mult", 3)}).candidates.size() == 1);
  CHECK(suggest_predicates(pi("mu", 2), {pi("mult", 3)}).candidates.empty());
}

TEST_CASE("suggestion pool includes library predicates") {
  auto pool = suggestion_pool(load(kMult));
  CHECK(pool.count(pi("mult", 3)));
  CHECK(pool.count(pi("length", 2)));
  CHECK(pool.count(pi("append", 3)));
}

TEST_CASE("call graph examples") {
  CallGraph g = build_call_graph(load(kMult));
  auto edges = edge_set(g);
  REQUIRE(edges.size() == 2);
  CHECK(std::count(edges.begin(), edges.end(), std::pair{pi("is", 2), false}) == 1);
  CHECK(std::count(edges.begin(), edges.end(), std::pair{pi("mult", 3), false}) == 1);
  CHECK(g.nodes.at(pi("is", 2)) == NodeKind::Builtin);
  CHECK(g.nodes.at(pi("mult", 3)) == NodeKind::User);

  CallGraph h = build_call_graph(load("sum(L, S) :- foldl(add, L, 0, S).\nadd(X, A, B) :- B is A + X.\n"));
  bool meta_add = false;
  for (const auto& e : h.edges)
    if (e.caller == pi("sum", 2) && e.callee == pi("add", 3)) meta_add = e.meta;
  CHECK(meta_add);

  CallGraph p = build_call_graph(load("p(X) :- q(X).\nq(a).\n"));
  REQUIRE(p.edges.size() == 1);
  CHECK(p.edges[0].caller == pi("p", 1));
  CHECK(p.edges[0].callee == pi("q", 1));
}

TEST_CASE("call graph walks control constructs and meta calls") {
  CallGraph g = build_call_graph(load(
      "r(L) :- \\+ a, ( b -> c ; d ), call(e, 1), maplist(f(2), L), findall(X, g(X), _).\n"
      "a. b. c. d. e(_). f(_, _). g(_).\n"));
  std::set<PredicateIndicator> callees;
  for (const auto* e : g.edges_from(pi("r", 1))) callees.insert(e->callee);
  for (auto want : {pi("a", 0), pi("b", 0), pi("c", 0), pi("d", 0), pi("e", 1), pi("f", 2), pi("g", 1)})
    CHECK_MESSAGE(callees.count(want), want.str());
  CHECK(g.nodes.at(pi("maplist", 2)) == NodeKind::Library);
}

TEST_CASE("unknown callees are Undefined nodes") {
  CallGraph g = build_call_graph(load("p :- nope(1).\n"));
  CHECK(g.nodes.at(pi("nope", 1)) == NodeKind::Undefined);
}

TEST_CASE("solution type examples") {
  CallGraph mult = build_call_graph(load(kMult));
  CHECK(classify_solution_type(mult, pi("mult", 3)).verdict == Technique::Recursive);

  CallGraph sum = build_call_graph(load("sum(L, S) :- foldl(add, L, 0, S).\nadd(X, A, B) :- B is A + X.\n"));
  auto v = classify_solution_type(sum, pi("sum", 2));
  CHECK(v.higher_order());
  CHECK_FALSE(v.recursive());

  CallGraph p = build_call_graph(load("p(X) :- q(X).\nq(a).\n"));
  CHECK(classify_solution_type(p, pi("p", 1)).verdict == Technique::NonRecursive);
  CHECK_THROWS_AS(classify_solution_type(p, pi("zzz", 1)), std::invalid_argument);
}

TEST_CASE("recursion through a helper counts") {
  CallGraph g = build_call_graph(load("even(0).\neven(N) :- N > 0, M is N - 1, odd(M).\nodd(N) :- N > 0, M is N - 1, even(M).\n"));
  CHECK(classify_solution_type(g, pi("even", 1)).recursive());
  CHECK(classify_solution_type(g, pi("odd", 1)).recursive());
}

TEST_CASE("technique requirement checks") {
  auto prog = load(std::string(kMult) + "p(X) :- q(X).\nq(a).\nsum(L, S) :- foldl(add, L, 0, S).\nadd(X, A, B) :- B is A + X.\n");
  CallGraph g = build_call_graph(prog);
  std::vector<SolutionTypeVerdict> verdicts = {classify_solution_type(g, pi("mult", 3)),
                                               classify_solution_type(g, pi("p", 1)),
                                               classify_solution_type(g, pi("sum", 2))};
  CHECK(check_required_technique(verdicts, {{pi("mult", 3), Technique::Recursive}}).empty());
  auto v = check_required_technique(verdicts, {{pi("p", 1), Technique::Recursive}});
  REQUIRE(v.size() == 1);
  CHECK(v[0].message == "p/1 must be recursive, but no recursive call was found");
  CHECK(check_required_technique(verdicts, {{pi("sum", 2), Technique::HigherOrder}}).empty());
  auto missing = check_required_technique(verdicts, {{pi("nope", 2), Technique::Recursive}});
  REQUIRE(missing.size() == 1);
  CHECK(missing[0].message == "nope/2 is required to be Recursive but is not defined");
}

TEST_CASE("technique names parse case-insensitively") {
  CHECK(parse_technique("Recursive") == Technique::Recursive);
  CHECK(parse_technique("higher_order") == Technique::HigherOrder);
  CHECK(parse_technique("NON_RECURSIVE") == Technique::NonRecursive);
  CHECK_FALSE(parse_technique("iterative").has_value());
}

TEST_CASE("solution type ignores clause order and variable names") {
  const char* a = "len([], 0).\nlen([_|T], N) :- len(T, M), N is M + 1.\nhelper(X) :- maplist(len, X, _).\n";
  const char* b = "helper(Ls) :- maplist(len, Ls, _).\nlen([_|Rest], K) :- len(Rest, J), K is J + 1.\nlen([], 0).\n";
  CallGraph ga = build_call_graph(load(a)), gb = build_call_graph(load(b));
  for (auto p : {pi("len", 2), pi("helper", 1)}) {
    auto va = classify_solution_type(ga, p), vb = classify_solution_type(gb, p);
    CHECK(va.verdict == vb.verdict);
    CHECK(va.higher_order() == vb.higher_order());
  }
}

TEST_CASE("reachability agrees with a brute-force closure on random graphs") {
  std::mt19937 rng(17);
  for (int round = 0; round < 100; ++round) {
    int n = 2 + static_cast<int>(rng() % 5);
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    std::string src;
    for (int i = 0; i < n; ++i) {
      std::string body;
      for (int j = 0; j < n; ++j) {
        if (rng() % 3 == 0) {
          adj[i][j] = true;
          body += (body.empty() ? "" : ", ") + std::string("p") + std::to_string(j);
        }
      }
      src += "p" + std::to_string(i) + (body.empty() ? ".\n" : " :- " + body + ".\n");
    }
    auto closure = adj;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (closure[i][k] && closure[k][j]) closure[i][j] = true;
    CallGraph g = build_call_graph(load(src));
    for (int i = 0; i < n; ++i) {
      auto r = g.reachable_from(pi("p" + std::to_string(i), 0));
      for (int j = 0; j < n; ++j) CHECK(r.count(pi("p" + std::to_string(j), 0)) == (closure[i][j] ? 1u : 0u));
      CHECK(classify_solution_type(g, pi("p" + std::to_string(i), 0)).recursive() == closure[i][i]);
    }
  }
}

TEST_CASE("warning synthesis") {
  TestResult open;
  open.suite = "max";
  open.name = "first";
  open.open_choice_warning = true;
  open.second_answer = "M = 2";
  TestResult loop;
  loop.suite = "loop";
  loop.name = "t";
  loop.verdict = Verdict::Diverged;
  loop.steps_used = 10'000;
  loop.call_chain = {pi("loop", 0)};
  RuntimeError unknown;
  unknown.kind = RuntimeError::Kind::UnknownPredicate;
  unknown.predicate = pi("multiply", 3);

  auto w = synthesize_warnings({open, loop, open}, {unknown}, {pi("mult", 3)});
  REQUIRE(w.size() == 3);
  CHECK(w[0].kind == WarningKind::OpenChoicePoint);
  CHECK(w[0].message == "test max:first succeeded but left a choice point open; backtracking gives another answer: M = 2");
  CHECK(w[1].kind == WarningKind::UnknownPredicate);
  CHECK(w[1].message == "unknown predicate multiply/3; did you mean mult/3?");
  CHECK(w[2].kind == WarningKind::Divergence);
  CHECK(w[2].message.starts_with("possible infinite loop in loop/0"));

  TestResult pass;
  CHECK(synthesize_warnings({pass}, {}, {}).empty());
}
