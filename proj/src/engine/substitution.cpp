#include "prologian/engine/substitution.hpp"

#include <utility>
#include <vector>

namespace prologian {

const Term* Substitution::lookup(int var_id) const {
  auto it = map_.find(var_id);
  return it == map_.end() ? nullptr : &it->second;
}

const Term& Substitution::walk(const Term& t) const {
  const Term* cur = &t;
  while (cur->is_var()) {
    const Term* next = lookup(cur->var_id);
    if (!next) break;
    cur = next;
  }
  return *cur;
}

Term Substitution::apply(const Term& t) const {
  const Term& w = walk(t);
  if (!w.is_compound()) return w;
  Term out = w;
  for (auto& a : out.args) a = apply(a);
  return out;
}

bool Substitution::operator==(const Substitution& other) const {
  if (map_.size() != other.map_.size()) return false;
  for (const auto& [id, t] : map_) {
    const Term* o = other.lookup(id);
    if (!o || !same_structure(apply(t), other.apply(*o))) return false;
  }
  return true;
}

namespace {

bool occurs(int var_id, const Term& t, const Substitution& s) {
  const Term& w = s.walk(t);
  if (w.is_var()) return w.var_id == var_id;
  for (const auto& a : w.args)
    if (occurs(var_id, a, s)) return true;
  return false;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b, Substitution s, UnifyOptions opts) {
  std::vector<std::pair<const Term*, const Term*>> stack{{&a, &b}};
  while (!stack.empty()) {
    auto [x0, y0] = stack.back();
    stack.pop_back();
    const Term& x = s.walk(*x0);
    const Term& y = s.walk(*y0);
    if (x.is_var() && y.is_var() && x.var_id == y.var_id) continue;
    if (x.is_var() || y.is_var()) {
      const Term& v = x.is_var() ? x : y;
      const Term& other = x.is_var() ? y : x;
      if (opts.occurs_check && !other.is_var() && occurs(v.var_id, other, s)) return std::nullopt;
      s.bind(v.var_id, other);
      continue;
    }
    if (x.kind != y.kind) return std::nullopt;
    switch (x.kind) {
      case Term::Kind::Atom:
        if (x.name != y.name) return std::nullopt;
        break;
      case Term::Kind::Integer:
        if (x.int_value != y.int_value) return std::nullopt;
        break;
      case Term::Kind::Float:
        if (x.float_value != y.float_value) return std::nullopt;
        break;
      case Term::Kind::Compound:
        if (x.name != y.name || x.args.size() != y.args.size()) return std::nullopt;
        for (std::size_t i = x.args.size(); i-- > 0;) stack.emplace_back(&x.args[i], &y.args[i]);
        break;
      case Term::Kind::Var:
        break;
    }
  }
  return s;
}

}  // namespace prologian
