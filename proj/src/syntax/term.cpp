#include "prologian/syntax/term.hpp"

#include <algorithm>
#include <set>

namespace prologian {

SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan out = a;
  if (b.start_offset < a.start_offset) {
    out.start_offset = b.start_offset;
    out.start_line = b.start_line;
    out.start_col = b.start_col;
  }
  if (b.end_offset > a.end_offset) {
    out.end_offset = b.end_offset;
    out.end_line = b.end_line;
    out.end_col = b.end_col;
  }
  return out;
}

Term Term::atom(std::string name, SourceSpan span) {
  Term t;
  t.kind = Kind::Atom;
  t.name = std::move(name);
  t.span = span;
  return t;
}

Term Term::integer(std::int64_t value, SourceSpan span) {
  Term t;
  t.kind = Kind::Integer;
  t.int_value = value;
  t.span = span;
  return t;
}

Term Term::floating(double value, SourceSpan span) {
  Term t;
  t.kind = Kind::Float;
  t.float_value = value;
  t.span = span;
  return t;
}

Term Term::var(std::string name, int id, SourceSpan span) {
  Term t;
  t.kind = Kind::Var;
  t.name = std::move(name);
  t.var_id = id;
  t.span = span;
  return t;
}

Term Term::compound(std::string name, std::vector<Term> args, SourceSpan span) {
  if (args.empty()) return atom(std::move(name), span);
  Term t;
  t.kind = Kind::Compound;
  t.name = std::move(name);
  t.args = std::move(args);
  t.span = span;
  return t;
}

Term Term::cons(Term head, Term tail, SourceSpan span) {
  std::vector<Term> args;
  args.reserve(2);
  args.push_back(std::move(head));
  args.push_back(std::move(tail));
  return compound(".", std::move(args), span);
}

Term Term::list(std::vector<Term> items, Term tail) {
  Term out = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(std::move(*it), std::move(out));
  return out;
}

bool Term::is_ground() const {
  if (kind == Kind::Var) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
}

std::size_t Term::size() const {
  std::size_t n = 1;
  for (const auto& a : args) n += a.size();
  return n;
}

namespace {

template <typename VarEq>
bool equal_impl(const Term& a, const Term& b, VarEq var_eq) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Atom:
      return a.name == b.name;
    case Term::Kind::Integer:
      return a.int_value == b.int_value;
    case Term::Kind::Float:
      return a.float_value == b.float_value;
    case Term::Kind::Var:
      return var_eq(a, b);
    case Term::Kind::Compound:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!equal_impl(a.args[i], b.args[i], var_eq)) return false;
      return true;
  }
  return false;
}

void collect_vars(const Term& t, std::vector<const Term*>& out, std::set<int>& seen) {
  if (t.is_var()) {
    if (seen.insert(t.var_id).second) out.push_back(&t);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out, seen);
}

}  // namespace

bool same_structure(const Term& a, const Term& b) {
  return equal_impl(a, b, [](const Term& x, const Term& y) {
    return x.var_id == y.var_id && x.name == y.name;
  });
}

bool same_shape_by_name(const Term& a, const Term& b) {
  return equal_impl(a, b, [](const Term& x, const Term& y) { return x.name == y.name; });
}

std::vector<const Term*> variables_of(const Term& t) {
  std::vector<const Term*> out;
  std::set<int> seen;
  collect_vars(t, out, seen);
  return out;
}

std::vector<Term> flatten_conjunction(const Term& t) {
  std::vector<Term> out;
  const Term* cur = &t;
  while (cur->is_compound(",", 2)) {
    auto left = flatten_conjunction(cur->args[0]);
    for (auto& g : left) out.push_back(std::move(g));
    cur = &cur->args[1];
  }
  out.push_back(*cur);
  return out;
}

Term make_conjunction(const std::vector<Term>& goals) {
  if (goals.empty()) return Term::atom("true");
  Term out = goals.back();
  for (std::size_t i = goals.size() - 1; i-- > 0;) {
    SourceSpan span = merge(goals[i].span, out.span);
    out = Term::compound(",", {goals[i], std::move(out)}, span);
  }
  return out;
}

ListView view_list(const Term& t) {
  ListView v;
  const Term* cur = &t;
  while (cur->is_cons()) {
    v.items.push_back(&cur->args[0]);
    cur = &cur->args[1];
  }
  v.tail = cur;
  return v;
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::Submission: return "submission";
    case Origin::Tests: return "tests";
    case Origin::Library: return "library";
    case Origin::Query: return "query";
  }
  return "unknown";
}

Term Clause::body_term() const { return make_conjunction(body); }

Term Clause::as_term() const {
  if (body.empty()) return head;
  return Term::compound(":-", {head, body_term()}, span);
}

void Program::add_clause(Clause clause) {
  auto pi = clause.indicator();
  auto [it, inserted] = index_.try_emplace(pi);
  if (inserted) order_.push_back(pi);
  it->second.push_back(clauses_.size());
  clauses_.push_back(std::move(clause));
}

void Program::append(const Program& other) {
  for (const auto& c : other.clauses_) add_clause(c);
  for (const auto& d : other.directives_) directives_.push_back(d);
}

std::vector<const Clause*> Program::clauses_of(const PredicateIndicator& pi) const {
  std::vector<const Clause*> out;
  auto it = index_.find(pi);
  if (it == index_.end()) return out;
  for (auto i : it->second) out.push_back(&clauses_[i]);
  return out;
}

std::vector<PredicateIndicator> Program::predicates() const { return order_; }

}  // namespace prologian
