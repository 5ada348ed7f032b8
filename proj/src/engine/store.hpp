#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian::detail {

using Idx = std::uint32_t;
using AtomId = std::uint32_t;

enum class Tag : std::uint8_t { Ref, Atom, Int, Float, Struct };

/// A heap cell. An unbound variable is a Ref to itself. A Struct cell points
/// at `arity` consecutive argument cells; Struct cells may be copied freely.
struct Cell {
  Tag tag = Tag::Atom;
  std::uint32_t arity = 0;
  AtomId functor = 0;
  union {
    std::int64_t i;
    double f;
    Idx ref;
  };

  Cell() : i(0) {}
  static Cell make_ref(Idx target) {
    Cell c;
    c.tag = Tag::Ref;
    c.ref = target;
    return c;
  }
  static Cell make_atom(AtomId a) {
    Cell c;
    c.tag = Tag::Atom;
    c.functor = a;
    return c;
  }
  static Cell make_int(std::int64_t v) {
    Cell c;
    c.tag = Tag::Int;
    c.i = v;
    return c;
  }
  static Cell make_float(double v) {
    Cell c;
    c.tag = Tag::Float;
    c.f = v;
    return c;
  }
  static Cell make_struct(AtomId f, std::uint32_t arity, Idx args) {
    Cell c;
    c.tag = Tag::Struct;
    c.functor = f;
    c.arity = arity;
    c.ref = args;
    return c;
  }
};

class AtomTable {
 public:
  AtomTable();
  AtomId intern(std::string_view name);
  const std::string& name(AtomId id) const { return names_[id]; }

  // Frequently used atoms, interned at construction.
  AtomId nil, dot, comma, semicolon, arrow, naf, cut, true_, fail, false_, call, minus, plus, eq,
      curly, empty_curly, less, greater, equal_sign;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, AtomId> ids_;
};

inline std::uint64_t pred_key(AtomId f, std::uint32_t arity) {
  return (static_cast<std::uint64_t>(f) << 32) | arity;
}

/// Builds terms into a cell vector. Indices are positions in that vector, so
/// the same code serves the heap (absolute) and clause templates (relative).
class CellBuilder {
 public:
  CellBuilder(std::vector<Cell>& cells, AtomTable& atoms) : cells_(cells), atoms_(atoms) {}

  /// Appends `t` and returns the index of its root cell. `vars` maps AST
  /// var ids to cell indices and is extended with new variables.
  Idx build(const Term& t, std::map<int, Idx>& vars);

 private:
  void build_into(Idx slot, const Term& t, std::map<int, Idx>& vars);
  std::vector<Cell>& cells_;
  AtomTable& atoms_;
};

/// Relocatable copy of a term, with variable cells pointing at themselves.
struct Template {
  std::vector<Cell> cells;
  Idx root = 0;
};

class Store {
 public:
  explicit Store(AtomTable& atoms) : atoms_(atoms) {}

  std::vector<Cell> heap;
  std::vector<Idx> trail;
  /// Variables at or above this index are newer than the last choice point and
  /// need no trailing.
  Idx boundary = 0;
  bool occurs_check = true;

  AtomTable& atoms() { return atoms_; }
  const AtomTable& atoms() const { return atoms_; }

  Idx deref(Idx i) const {
    while (true) {
      const Cell& c = heap[i];
      if (c.tag != Tag::Ref || c.ref == i) return i;
      i = c.ref;
    }
  }
  bool is_unbound(Idx i) const {
    const Cell& c = heap[i];
    return c.tag == Tag::Ref && c.ref == i;
  }

  Idx new_var();
  Idx push(const Cell& c);
  /// Allocates a struct cell plus `arity` argument cells; returns the struct cell.
  Idx new_struct(AtomId f, std::uint32_t arity);
  Idx build(const Term& t, std::map<int, Idx>& vars);
  Idx build(const Term& t) {
    std::map<int, Idx> vars;
    return build(t, vars);
  }
  /// Copies a template onto the heap; returns the new root index.
  Idx instantiate(const Template& tpl);
  Idx instantiate_cells(const std::vector<Cell>& cells);

  void bind(Idx var, Idx value);
  bool unify(Idx a, Idx b);
  /// Unifies and always undoes the bindings; reports unifiability.
  bool unifiable(Idx a, Idx b);
  void undo_to(std::size_t trail_mark);

  /// Standard order of terms: Var < Number < Atom < Compound.
  int compare(Idx a, Idx b) const;

  Template copy_out(Idx root) const;
  /// Resolves a heap term into an AST term. Unbound variables are named via
  /// `names` (heap index -> name), which is extended as needed.
  Term to_term(Idx root, std::map<Idx, std::string>& names) const;
  Term to_term(Idx root) const {
    std::map<Idx, std::string> names;
    return to_term(root, names);
  }

  /// Proper-list elements of `root`; false if it is not a proper list.
  bool list_items(Idx root, std::vector<Idx>& out) const;
  Idx make_list(const std::vector<Idx>& items);

 private:
  bool occurs(Idx var, Idx t) const;
  AtomTable& atoms_;
};

}  // namespace prologian::detail
