#pragma once

#include <map>
#include <optional>

#include "prologian/syntax/term.hpp"

namespace prologian {

/// Variable id -> term. Bindings may refer to other bound variables; apply()
/// dereferences fully.
class Substitution {
 public:
  void bind(int var_id, Term value) { map_[var_id] = std::move(value); }
  const Term* lookup(int var_id) const;
  bool contains(int var_id) const { return map_.count(var_id) != 0; }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const std::map<int, Term>& bindings() const { return map_; }

  /// Follows variable bindings until an unbound variable or non-variable.
  const Term& walk(const Term& t) const;
  /// Replaces every bound variable in `t`, recursively.
  Term apply(const Term& t) const;

  bool operator==(const Substitution& other) const;

 private:
  std::map<int, Term> map_;
};

struct UnifyOptions {
  bool occurs_check = true;
};

/// Most general unifier extending `s`, or nullopt. Variables are identified by
/// var_id.
std::optional<Substitution> unify(const Term& a, const Term& b, Substitution s, UnifyOptions opts = {});

}  // namespace prologian
