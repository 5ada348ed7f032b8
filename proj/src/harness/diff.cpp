#include "prologian/harness/diff.hpp"

#include <map>

#include "prologian/syntax/writer.hpp"

namespace prologian {

std::string format_path(const std::vector<PathStep>& path) {
  if (path.empty()) return "the whole term";
  std::string out;
  for (const auto& step : path) {
    if (!out.empty()) out += " > ";
    switch (step.kind) {
      case PathStep::Kind::Arg: out += "argument " + std::to_string(step.index); break;
      case PathStep::Kind::ListElem: out += "list index " + std::to_string(step.index); break;
      case PathStep::Kind::ListTail: out += "list tail after index " + std::to_string(step.index); break;
    }
  }
  return out;
}

namespace {

bool variant_equal(const Term& a, const Term& b, std::map<int, int>& ab, std::map<int, int>& ba) {
  if (a.is_var() || b.is_var()) {
    if (!a.is_var() || !b.is_var()) return false;
    auto [ia, newa] = ab.emplace(a.var_id, b.var_id);
    auto [ib, newb] = ba.emplace(b.var_id, a.var_id);
    return ia->second == b.var_id && ib->second == a.var_id;
  }
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Atom: return a.name == b.name;
    case Term::Kind::Integer: return a.int_value == b.int_value;
    case Term::Kind::Float: return a.float_value == b.float_value;
    case Term::Kind::Compound:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!variant_equal(a.args[i], b.args[i], ab, ba)) return false;
      return true;
    case Term::Kind::Var: return true;
  }
  return false;
}

// Variables on either side match anything: expectations are usually ground and
// unbound answer variables carry generated names.
bool loosely_equal(const Term& a, const Term& b) {
  if (a.is_var() && b.is_var()) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Atom: return a.name == b.name;
    case Term::Kind::Integer: return a.int_value == b.int_value;
    case Term::Kind::Float: return a.float_value == b.float_value;
    case Term::Kind::Compound:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!loosely_equal(a.args[i], b.args[i])) return false;
      return true;
    case Term::Kind::Var: return true;
  }
  return false;
}

// Returns true and fills path/subterms when a mismatch is found.
bool walk(const Term& e, const Term& a, std::vector<PathStep>& path, const Term*& e_at, const Term*& a_at) {
  if (loosely_equal(e, a)) return false;
  if (e.is_cons() && a.is_cons()) {
    const Term* ec = &e;
    const Term* ac = &a;
    std::size_t i = 0;
    while (ec->is_cons() && ac->is_cons()) {
      if (!loosely_equal(ec->args[0], ac->args[0])) {
        path.push_back({PathStep::Kind::ListElem, i});
        walk(ec->args[0], ac->args[0], path, e_at, a_at);
        return true;
      }
      ec = &ec->args[1];
      ac = &ac->args[1];
      ++i;
    }
    path.push_back({PathStep::Kind::ListTail, i - 1});
    e_at = ec;
    a_at = ac;
    return true;
  }
  if (e.is_compound() && a.is_compound() && e.name == a.name && e.args.size() == a.args.size() && !e.is_cons()) {
    for (std::size_t k = 0; k < e.args.size(); ++k) {
      if (!loosely_equal(e.args[k], a.args[k])) {
        path.push_back({PathStep::Kind::Arg, k + 1});
        walk(e.args[k], a.args[k], path, e_at, a_at);
        return true;
      }
    }
  }
  e_at = &e;
  a_at = &a;
  return true;
}

std::string show(const Term& t) { return format_term(number_vars(t)); }

}  // namespace

bool variant_equal(const Term& a, const Term& b) {
  std::map<int, int> ab, ba;
  return variant_equal(a, b, ab, ba);
}

AssertionDiff diff_outputs(const Term& expected, const Term& actual) {
  AssertionDiff d;
  d.expected = expected;
  d.actual = actual;
  const Term* e_at = nullptr;
  const Term* a_at = nullptr;
  d.diverges = walk(expected, actual, d.path, e_at, a_at);
  if (!d.diverges) return d;
  d.expected_at = *e_at;
  d.actual_at = *a_at;
  d.rendered = "expected: " + show(expected) + "\n  actual: " + show(actual) + "\n  first difference at " +
               format_path(d.path) + ": expected `" + show(*e_at) + "`, got `" + show(*a_at) + "`";
  return d;
}

AssertionDiff no_solution_diff(const Term& expected) {
  AssertionDiff d;
  d.expected = expected;
  d.diverges = true;
  d.expected_at = expected;
  d.rendered = "expected: " + show(expected) + "\n  actual: no solution";
  return d;
}

const Term* subterm_at(const Term& t, const std::vector<PathStep>& path) {
  const Term* cur = &t;
  for (const auto& step : path) {
    switch (step.kind) {
      case PathStep::Kind::Arg:
        if (!cur->is_compound() || step.index == 0 || step.index > cur->args.size()) return nullptr;
        cur = &cur->args[step.index - 1];
        break;
      case PathStep::Kind::ListElem:
      case PathStep::Kind::ListTail: {
        for (std::size_t i = 0; i < step.index; ++i) {
          if (!cur->is_cons()) return nullptr;
          cur = &cur->args[1];
        }
        if (!cur->is_cons()) return nullptr;
        cur = step.kind == PathStep::Kind::ListElem ? &cur->args[0] : &cur->args[1];
        break;
      }
    }
  }
  return cur;
}

}  // namespace prologian
