// Compares the engine against a small continuation-passing meta-interpreter
// on random stratified programs. The interpreter shares only the term type.
#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "prologian/engine/engine.hpp"
#include "prologian/syntax/parser.hpp"
#include "prologian/syntax/writer.hpp"

using namespace prologian;

namespace {

using Bindings = std::map<int, Term>;

const Term& deref(const Term& t, const Bindings& b) {
  const Term* cur = &t;
  while (cur->is_var()) {
    auto it = b.find(cur->var_id);
    if (it == b.end()) break;
    cur = &it->second;
  }
  return *cur;
}

Term resolve(const Term& t, const Bindings& b) {
  const Term& d = deref(t, b);
  if (!d.is_compound()) return d;
  Term out = d;
  for (Term& a : out.args) a = resolve(a, b);
  return out;
}

bool occurs(int id, const Term& t, const Bindings& b) {
  const Term& d = deref(t, b);
  if (d.is_var()) return d.var_id == id;
  for (const Term& a : d.args)
    if (occurs(id, a, b)) return true;
  return false;
}

bool unify_into(const Term& x, const Term& y, Bindings& b) {
  const Term& a = deref(x, b);
  const Term& c = deref(y, b);
  if (a.is_var() && c.is_var() && a.var_id == c.var_id) return true;
  if (a.is_var()) {
    if (occurs(a.var_id, c, b)) return false;
    b[a.var_id] = c;
    return true;
  }
  if (c.is_var()) return unify_into(c, a, b);
  if (a.kind != c.kind || a.name != c.name || a.args.size() != c.args.size()) return false;
  if (a.kind == Term::Kind::Integer && a.int_value != c.int_value) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify_into(a.args[i], c.args[i], b)) return false;
  return true;
}

Term offset_vars(const Term& t, int offset) {
  if (t.is_var()) return Term::var(t.name, t.var_id + offset);
  Term out = t;
  for (Term& a : out.args) a = offset_vars(a, offset);
  return out;
}

struct Goal {
  Term term;
  int cut_frame;
};

// Result codes: 0 exhausted, kStop when the consumer wants no more answers,
// otherwise the id of the frame a cut is unwinding to.
constexpr int kStop = -1;

class Oracle {
 public:
  explicit Oracle(const Program& p) : program_(p) {}

  std::vector<Term> all(const Term& query, const Term& tmpl) {
    std::vector<Term> out;
    solve({{query, 0}}, {}, [&](const Bindings& b) {
      out.push_back(resolve(tmpl, b));
      return true;
    });
    return out;
  }

 private:
  using Consumer = std::function<bool(const Bindings&)>;

  int solve(std::vector<Goal> stack, Bindings b, const Consumer& k) {
    if (stack.empty()) return k(b) ? 0 : kStop;
    Goal g = stack.back();
    stack.pop_back();
    const Term t = deref(g.term, b);
    if (t.is_atom("true")) return solve(stack, b, k);
    if (t.is_atom("fail")) return 0;
    if (t.is_atom("!")) {
      int r = solve(stack, b, k);
      return r != 0 ? r : g.cut_frame;
    }
    if (t.is_compound(",", 2)) {
      stack.push_back({t.args[1], g.cut_frame});
      stack.push_back({t.args[0], g.cut_frame});
      return solve(stack, b, k);
    }
    if (t.is_compound("=", 2)) {
      Bindings nb = b;
      return unify_into(t.args[0], t.args[1], nb) ? solve(stack, nb, k) : 0;
    }
    if (t.is_compound("\\+", 1)) {
      return first(t.args[0], b) ? 0 : solve(stack, b, k);
    }
    if (t.is_compound(";", 2)) {
      const Term& lhs = t.args[0];
      if (lhs.is_compound("->", 2)) {
        std::optional<Bindings> cond = first(lhs.args[0], b);
        auto branch = stack;
        branch.push_back({cond ? lhs.args[1] : t.args[1], g.cut_frame});
        return solve(branch, cond ? *cond : b, k);
      }
      for (const Term& alt : {t.args[0], t.args[1]}) {
        auto branch = stack;
        branch.push_back({alt, g.cut_frame});
        int r = solve(branch, b, k);
        if (r != 0) return r;
      }
      return 0;
    }
    int frame = ++next_frame_;
    for (const Clause* c : program_.clauses_of(t.indicator())) {
      int offset = next_var_;
      next_var_ += c->var_count + 1;
      Bindings nb = b;
      if (!unify_into(offset_vars(c->head, offset), t, nb)) continue;
      auto branch = stack;
      for (auto it = c->body.rbegin(); it != c->body.rend(); ++it) branch.push_back({offset_vars(*it, offset), frame});
      int r = solve(branch, nb, k);
      if (r == frame) return 0;
      if (r != 0) return r;
    }
    return 0;
  }

  std::optional<Bindings> first(const Term& goal, const Bindings& b) {
    std::optional<Bindings> found;
    int frame = ++next_frame_;
    solve({{goal, frame}}, b, [&](const Bindings& nb) {
      found = nb;
      return false;
    });
    return found;
  }

  const Program& program_;
  int next_frame_ = 1;
  int next_var_ = 100000;
};

// Predicate p<i> only calls p<j> with j < i, so every program terminates.
class ProgramGen {
 public:
  explicit ProgramGen(std::uint32_t seed) : rng_(seed) {}

  std::string program() {
    std::string out;
    int clauses = 0;
    for (int i = 0; i < kPreds && clauses < 6; ++i) {
      int n = 1 + pick(2);
      for (int c = 0; c < n && clauses < 6; ++c, ++clauses) out += clause(i);
    }
    return out;
  }

  int last_pred() const { return kPreds - 1; }

 private:
  static constexpr int kPreds = 4;

  int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

  std::string arg() {
    static const char* atoms[] = {"a", "b", "c"};
    static const char* vars[] = {"X", "Y", "Z"};
    switch (pick(5)) {
      case 0:
      case 1: return atoms[pick(3)];
      case 2:
      case 3: return vars[pick(3)];
      default: return std::string("f(") + vars[pick(3)] + ")";
    }
  }

  std::string call(int below) { return "p" + std::to_string(pick(below)) + "(" + arg() + ", " + arg() + ")"; }

  std::string goal(int pred, int depth) {
    int choices = depth > 1 ? 4 : 7;
    switch (pick(choices)) {
      case 0: return pred > 0 ? call(pred) : arg() + " = " + arg();
      case 1: return arg() + " = " + arg();
      case 2: return "!";
      case 3: return pred > 0 ? "\\+ " + call(pred) : "\\+ " + arg() + " = " + arg();
      case 4: return "( " + goal(pred, depth + 1) + " ; " + goal(pred, depth + 1) + " )";
      case 5:
        return "( " + goal(pred, depth + 1) + " -> " + goal(pred, depth + 1) + " ; " + goal(pred, depth + 1) + " )";
      default: return pred > 0 ? call(pred) : "true";
    }
  }

  std::string clause(int pred) {
    std::string head = "p" + std::to_string(pred) + "(" + arg() + ", " + arg() + ")";
    int goals = pick(4);
    if (goals == 0) return head + ".\n";
    std::string body;
    for (int i = 0; i < goals; ++i) body += (i ? ", " : "") + goal(pred, 0);
    return head + " :- " + body + ".\n";
  }

  std::mt19937 rng_;
};

std::vector<std::string> canonical(const std::vector<Term>& terms) {
  std::vector<std::string> out;
  for (const Term& t : terms) out.push_back(format_term(number_vars(t)));
  return out;
}

}  // namespace

TEST_CASE("engine agrees with a reference interpreter on random stratified programs") {
  EngineLimits limits;
  limits.max_solutions = 100'000;
  int compared = 0;
  for (std::uint32_t seed = 1; seed <= 400; ++seed) {
    ProgramGen gen(seed);
    std::string src = gen.program();
    auto parsed = parse_program(src);
    REQUIRE_MESSAGE(parsed.ok(), src);
    for (int p = 0; p <= gen.last_pred(); ++p) {
      std::string q = "p" + std::to_string(p) + "(A, B)";
      Term query = parse_query(q);
      Term tmpl = parse_term("ans(A, B)");
      // parse_term numbers variables from zero in order, as parse_query does.
      Oracle oracle(parsed.program);
      std::vector<std::string> expected = canonical(oracle.all(query, tmpl));
      SolveOutcome got = solve(parsed.program, query, limits);
      std::vector<Term> answers;
      for (const Answer& a : got.solutions) answers.push_back(a.substitution().apply(tmpl));
      CHECK_MESSAGE(canonical(answers) == expected, "program:\n" << src << "query: " << q);
      ++compared;
    }
  }
  CHECK(compared == 1600);
}

TEST_CASE("reference interpreter sanity") {
  auto parsed = parse_program("q(a).\nq(b).\nr(X) :- q(X), !.\n");
  REQUIRE(parsed.ok());
  Oracle oracle(parsed.program);
  Term q = parse_query("r(A)");
  CHECK(canonical(oracle.all(q, parse_term("ans(A)"))) == std::vector<std::string>{"ans(a)"});
}
