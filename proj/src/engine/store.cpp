#include "store.hpp"

#include <algorithm>
#include <utility>

namespace prologian::detail {

AtomTable::AtomTable() {
  nil = intern("[]");
  dot = intern(".");
  comma = intern(",");
  semicolon = intern(";");
  arrow = intern("->");
  naf = intern("\\+");
  cut = intern("!");
  true_ = intern("true");
  fail = intern("fail");
  false_ = intern("false");
  call = intern("call");
  minus = intern("-");
  plus = intern("+");
  eq = intern("=");
  curly = intern("{}");
  empty_curly = curly;
  less = intern("<");
  greater = intern(">");
  equal_sign = eq;
}

AtomId AtomTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<AtomId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

Idx CellBuilder::build(const Term& t, std::map<int, Idx>& vars) {
  auto slot = static_cast<Idx>(cells_.size());
  cells_.emplace_back();
  build_into(slot, t, vars);
  return slot;
}

void CellBuilder::build_into(Idx slot, const Term& t, std::map<int, Idx>& vars) {
  switch (t.kind) {
    case Term::Kind::Var: {
      auto it = vars.find(t.var_id);
      if (it == vars.end()) {
        vars.emplace(t.var_id, slot);
        cells_[slot] = Cell::make_ref(slot);
      } else {
        cells_[slot] = Cell::make_ref(it->second);
      }
      return;
    }
    case Term::Kind::Atom:
      cells_[slot] = Cell::make_atom(atoms_.intern(t.name));
      return;
    case Term::Kind::Integer:
      cells_[slot] = Cell::make_int(t.int_value);
      return;
    case Term::Kind::Float:
      cells_[slot] = Cell::make_float(t.float_value);
      return;
    case Term::Kind::Compound: {
      auto args = static_cast<Idx>(cells_.size());
      auto n = static_cast<std::uint32_t>(t.args.size());
      cells_.resize(cells_.size() + n);
      for (std::uint32_t k = 0; k < n; ++k) build_into(args + k, t.args[k], vars);
      cells_[slot] = Cell::make_struct(atoms_.intern(t.name), n, args);
      return;
    }
  }
}

Idx Store::new_var() {
  auto i = static_cast<Idx>(heap.size());
  heap.push_back(Cell::make_ref(i));
  return i;
}

Idx Store::push(const Cell& c) {
  auto i = static_cast<Idx>(heap.size());
  heap.push_back(c);
  return i;
}

Idx Store::new_struct(AtomId f, std::uint32_t arity) {
  auto s = static_cast<Idx>(heap.size());
  heap.push_back(Cell::make_struct(f, arity, s + 1));
  for (std::uint32_t k = 0; k < arity; ++k) heap.push_back(Cell::make_ref(s + 1 + k));
  return s;
}

Idx Store::build(const Term& t, std::map<int, Idx>& vars) {
  CellBuilder b(heap, atoms_);
  return b.build(t, vars);
}

Idx Store::instantiate_cells(const std::vector<Cell>& cells) {
  auto base = static_cast<Idx>(heap.size());
  heap.reserve(heap.size() + cells.size());
  for (const Cell& c : cells) {
    Cell copy = c;
    if (c.tag == Tag::Ref || c.tag == Tag::Struct) copy.ref += base;
    heap.push_back(copy);
  }
  return base;
}

Idx Store::instantiate(const Template& tpl) { return instantiate_cells(tpl.cells) + tpl.root; }

void Store::bind(Idx var, Idx value) {
  const Cell& v = heap[value];
  if (v.tag == Tag::Ref) {
    heap[var] = Cell::make_ref(value);
  } else {
    heap[var] = v;
  }
  if (var < boundary) trail.push_back(var);
}

void Store::undo_to(std::size_t trail_mark) {
  while (trail.size() > trail_mark) {
    Idx v = trail.back();
    trail.pop_back();
    heap[v] = Cell::make_ref(v);
  }
}

bool Store::occurs(Idx var, Idx t) const {
  std::vector<Idx> stack{t};
  while (!stack.empty()) {
    Idx i = deref(stack.back());
    stack.pop_back();
    const Cell& c = heap[i];
    if (c.tag == Tag::Ref) {
      if (i == var) return true;
    } else if (c.tag == Tag::Struct) {
      for (std::uint32_t k = 0; k < c.arity; ++k) stack.push_back(c.ref + k);
    }
  }
  return false;
}

bool Store::unify(Idx a, Idx b) {
  std::vector<std::pair<Idx, Idx>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x0, y0] = stack.back();
    stack.pop_back();
    Idx x = deref(x0);
    Idx y = deref(y0);
    if (x == y) continue;
    const Cell cx = heap[x];
    const Cell cy = heap[y];
    bool xv = cx.tag == Tag::Ref;
    bool yv = cy.tag == Tag::Ref;
    if (xv && yv) {
      // Younger variable points at the older one.
      if (x < y) bind(y, x);
      else bind(x, y);
      continue;
    }
    if (xv || yv) {
      Idx var = xv ? x : y;
      Idx val = xv ? y : x;
      if (occurs_check && heap[val].tag == Tag::Struct && occurs(var, val)) return false;
      bind(var, val);
      continue;
    }
    if (cx.tag != cy.tag) return false;
    switch (cx.tag) {
      case Tag::Atom:
        if (cx.functor != cy.functor) return false;
        break;
      case Tag::Int:
        if (cx.i != cy.i) return false;
        break;
      case Tag::Float:
        if (cx.f != cy.f) return false;
        break;
      case Tag::Struct:
        if (cx.functor != cy.functor || cx.arity != cy.arity) return false;
        if (cx.ref == cy.ref) break;
        for (std::uint32_t k = cx.arity; k-- > 0;) stack.emplace_back(cx.ref + k, cy.ref + k);
        break;
      case Tag::Ref:
        break;
    }
  }
  return true;
}

bool Store::unifiable(Idx a, Idx b) {
  Idx saved_boundary = boundary;
  boundary = static_cast<Idx>(heap.size());
  std::size_t mark = trail.size();
  bool ok = unify(a, b);
  undo_to(mark);
  boundary = saved_boundary;
  return ok;
}

namespace {

int type_rank(Tag t) {
  switch (t) {
    case Tag::Ref: return 0;
    case Tag::Int:
    case Tag::Float: return 1;
    case Tag::Atom: return 3;
    case Tag::Struct: return 4;
  }
  return 5;
}

int sign(double d) { return d < 0 ? -1 : (d > 0 ? 1 : 0); }

}  // namespace

int Store::compare(Idx a, Idx b) const {
  std::vector<std::pair<Idx, Idx>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x0, y0] = stack.back();
    stack.pop_back();
    Idx x = deref(x0);
    Idx y = deref(y0);
    if (x == y) continue;
    const Cell& cx = heap[x];
    const Cell& cy = heap[y];
    int rx = type_rank(cx.tag), ry = type_rank(cy.tag);
    if (rx != ry) return rx < ry ? -1 : 1;
    switch (cx.tag) {
      case Tag::Ref:
        return x < y ? -1 : 1;
      case Tag::Int:
      case Tag::Float: {
        if (cx.tag == Tag::Int && cy.tag == Tag::Int) {
          if (cx.i != cy.i) return cx.i < cy.i ? -1 : 1;
          break;
        }
        double dx = cx.tag == Tag::Int ? static_cast<double>(cx.i) : cx.f;
        double dy = cy.tag == Tag::Int ? static_cast<double>(cy.i) : cy.f;
        if (dx != dy) return sign(dx - dy);
        if (cx.tag != cy.tag) return cx.tag == Tag::Float ? -1 : 1;
        break;
      }
      case Tag::Atom: {
        if (cx.functor == cy.functor) break;
        int c = atoms_.name(cx.functor).compare(atoms_.name(cy.functor));
        return c < 0 ? -1 : 1;
      }
      case Tag::Struct: {
        if (cx.arity != cy.arity) return cx.arity < cy.arity ? -1 : 1;
        if (cx.functor != cy.functor) {
          int c = atoms_.name(cx.functor).compare(atoms_.name(cy.functor));
          return c < 0 ? -1 : 1;
        }
        for (std::uint32_t k = cx.arity; k-- > 0;) stack.emplace_back(cx.ref + k, cy.ref + k);
        break;
      }
    }
  }
  return 0;
}

Template Store::copy_out(Idx root) const {
  Template tpl;
  std::map<Idx, Idx> vars;
  // Iterative copy: (source heap index, destination slot).
  tpl.cells.emplace_back();
  std::vector<std::pair<Idx, Idx>> work{{root, 0}};
  while (!work.empty()) {
    auto [src0, slot] = work.back();
    work.pop_back();
    Idx src = deref(src0);
    const Cell& c = heap[src];
    switch (c.tag) {
      case Tag::Ref: {
        auto it = vars.find(src);
        if (it == vars.end()) {
          vars.emplace(src, slot);
          tpl.cells[slot] = Cell::make_ref(slot);
        } else {
          tpl.cells[slot] = Cell::make_ref(it->second);
        }
        break;
      }
      case Tag::Struct: {
        auto args = static_cast<Idx>(tpl.cells.size());
        tpl.cells.resize(tpl.cells.size() + c.arity);
        tpl.cells[slot] = Cell::make_struct(c.functor, c.arity, args);
        for (std::uint32_t k = c.arity; k-- > 0;) work.emplace_back(c.ref + k, args + k);
        break;
      }
      default:
        tpl.cells[slot] = c;
    }
  }
  tpl.root = 0;
  return tpl;
}

Term Store::to_term(Idx root, std::map<Idx, std::string>& names) const {
  Idx i = deref(root);
  const Cell& c = heap[i];
  switch (c.tag) {
    case Tag::Ref: {
      auto it = names.find(i);
      if (it == names.end()) it = names.emplace(i, "_G" + std::to_string(names.size() + 1)).first;
      return Term::var(it->second, static_cast<int>(i));
    }
    case Tag::Atom:
      return Term::atom(atoms_.name(c.functor));
    case Tag::Int:
      return Term::integer(c.i);
    case Tag::Float:
      return Term::floating(c.f);
    case Tag::Struct: {
      // Lists iteratively so long lists do not exhaust the C++ stack.
      if (c.functor == atoms_.dot && c.arity == 2) {
        std::vector<Term> items;
        Idx cur = i;
        while (true) {
          const Cell& cc = heap[cur];
          if (cc.tag != Tag::Struct || cc.functor != atoms_.dot || cc.arity != 2) break;
          items.push_back(to_term(cc.ref, names));
          cur = deref(cc.ref + 1);
        }
        return Term::list(std::move(items), to_term(cur, names));
      }
      std::vector<Term> args;
      args.reserve(c.arity);
      for (std::uint32_t k = 0; k < c.arity; ++k) args.push_back(to_term(c.ref + k, names));
      return Term::compound(atoms_.name(c.functor), std::move(args));
    }
  }
  return {};
}

bool Store::list_items(Idx root, std::vector<Idx>& out) const {
  Idx cur = deref(root);
  while (true) {
    const Cell& c = heap[cur];
    if (c.tag == Tag::Atom && c.functor == atoms_.nil) return true;
    if (c.tag != Tag::Struct || c.functor != atoms_.dot || c.arity != 2) return false;
    out.push_back(c.ref);
    cur = deref(c.ref + 1);
  }
}

Idx Store::make_list(const std::vector<Idx>& items) {
  Idx tail = push(Cell::make_atom(atoms_.nil));
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    Idx cell = new_struct(atoms_.dot, 2);
    // Argument slots are fresh variables; point them at the element and tail.
    heap[cell + 1] = heap[*it].tag == Tag::Ref ? Cell::make_ref(*it) : heap[deref(*it)];
    heap[cell + 2] = heap[tail].tag == Tag::Ref ? Cell::make_ref(tail) : heap[tail];
    tail = cell;
  }
  return tail;
}

}  // namespace prologian::detail
