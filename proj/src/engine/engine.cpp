#include "prologian/engine/engine.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <unordered_map>

#include "arith.hpp"
#include "library.hpp"
#include "prologian/syntax/writer.hpp"
#include "store.hpp"

namespace prologian {

using namespace detail;

void EngineLimits::validate() const {
  if (max_steps == 0 || max_solutions == 0 || max_depth == 0)
    throw std::invalid_argument("engine limits must be positive");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Exhausted: return "Exhausted";
    case SolveStatus::ChoicePointsRemain: return "ChoicePointsRemain";
    case SolveStatus::StepLimitReached: return "StepLimitReached";
    case SolveStatus::DepthLimitReached: return "DepthLimitReached";
  }
  return "?";
}

std::string_view to_string(RuntimeError::Kind kind) {
  switch (kind) {
    case RuntimeError::Kind::UnknownPredicate: return "UnknownPredicate";
    case RuntimeError::Kind::Instantiation: return "Instantiation";
    case RuntimeError::Kind::TypeError: return "TypeError";
    case RuntimeError::Kind::ZeroDivisor: return "ZeroDivisor";
    case RuntimeError::Kind::ResourceLimit: return "ResourceLimit";
  }
  return "?";
}

std::string RuntimeError::str() const {
  std::string s = message;
  if (culprit) s += " at " + std::to_string(culprit->start_line) + ":" + std::to_string(culprit->start_col);
  if (!call_chain.empty()) s += " in " + call_chain.back().str();
  return s;
}

const Term* Answer::get(std::string_view name) const {
  for (const auto& b : bindings)
    if (b.name == name) return &b.value;
  return nullptr;
}

namespace {

bool unbound_self(const Binding& b) { return b.value.is_var() && b.value.name == b.name; }

}  // namespace

Substitution Answer::substitution() const {
  Substitution s;
  for (const auto& b : bindings)
    if (!unbound_self(b)) s.bind(b.var_id, b.value);
  return s;
}

std::string Answer::str() const {
  std::string out;
  for (const auto& b : bindings) {
    if (unbound_self(b)) continue;
    if (!out.empty()) out += ", ";
    out += b.name + " = " + format_term(b.value);
  }
  return out.empty() ? "true" : out;
}

bool has_open_alternatives(const SolveOutcome& outcome, std::size_t index) {
  if (index >= outcome.solutions.size()) throw std::out_of_range("solution index out of range");
  return outcome.solutions[index].open_alternatives;
}

Term number_to_term(const Number& n) {
  if (std::holds_alternative<std::int64_t>(n)) return Term::integer(std::get<std::int64_t>(n));
  return Term::floating(std::get<double>(n));
}

namespace {

constexpr Idx kNone = std::numeric_limits<Idx>::max();
constexpr std::size_t kMaxChain = 64;

enum class GoalKind : std::uint8_t { Call, CutTo, NafFail, Collect, Exit };

struct Goal {
  GoalKind kind;
  Idx term;
  std::uint32_t barrier;
  std::int32_t next;
  std::uint32_t depth;
  std::int32_t frame;
  std::uint32_t aux;
};

enum class CpKind : std::uint8_t { Clauses, Alternative, NafSucceed, Findall, Between };

struct ChoicePoint {
  CpKind kind;
  std::uint32_t heap = 0, trail = 0, goals = 0, frames = 0;
  std::int32_t cont = -1;
  Idx term = kNone;
  std::uint32_t barrier = 0;
  std::int32_t frame = -1;
  std::uint32_t pred = 0, next_clause = 0;
  std::int64_t lo = 0, hi = 0;
  std::uint32_t findall = 0;
};

struct CallFrame {
  std::uint32_t pred;
  std::int32_t parent;
  std::int32_t source;  // index into Machine::sources_, -1 for library clauses
  std::uint32_t depth;
};

enum class KeyKind : std::uint8_t { Var, Atom, Int, Float, Functor };

struct IndexKey {
  KeyKind kind = KeyKind::Var;
  AtomId functor = 0;
  std::uint32_t arity = 0;
  std::int64_t i = 0;
  double f = 0;

  bool compatible(const IndexKey& o) const {
    if (kind == KeyKind::Var || o.kind == KeyKind::Var) return true;
    if (kind != o.kind) return false;
    switch (kind) {
      case KeyKind::Atom: return functor == o.functor;
      case KeyKind::Int: return i == o.i;
      case KeyKind::Float: return f == o.f;
      case KeyKind::Functor: return functor == o.functor && arity == o.arity;
      case KeyKind::Var: return true;
    }
    return true;
  }
};

IndexKey key_of_cell(const Cell& c) {
  IndexKey k;
  switch (c.tag) {
    case Tag::Ref: k.kind = KeyKind::Var; break;
    case Tag::Atom: k.kind = KeyKind::Atom; k.functor = c.functor; break;
    case Tag::Int: k.kind = KeyKind::Int; k.i = c.i; break;
    case Tag::Float: k.kind = KeyKind::Float; k.f = c.f; break;
    case Tag::Struct: k.kind = KeyKind::Functor; k.functor = c.functor; k.arity = c.arity; break;
  }
  return k;
}

struct ClauseCode {
  Template tpl;
  Idx head = 0;
  Idx body = kNone;
  IndexKey key;
  std::int32_t source = -1;
};

struct Predicate {
  PredicateIndicator pi;
  std::vector<ClauseCode> clauses;
};

struct LimitHit {
  SolveStatus status;
};

/// Error raised inside a built-in; converted to EngineError with context.
struct BuiltinError {
  RuntimeError::Kind kind;
  std::string message;
};

[[noreturn]] void instantiation_error() {
  throw BuiltinError{RuntimeError::Kind::Instantiation, "Arguments are not sufficiently instantiated"};
}

[[noreturn]] void type_error(const std::string& expected, const std::string& culprit) {
  throw BuiltinError{RuntimeError::Kind::TypeError, "Type error: `" + expected + "' expected, found `" + culprit + "'"};
}

}  // namespace

class Machine {
 public:
  Machine(const Program& program, EngineOptions options);

  void start(const Term& query, const EngineLimits& limits);
  std::optional<Answer> next();
  bool has_more() const { return started_ && !finished_ && !cps_.empty(); }

  EngineOptions options_;
  AtomTable atoms_;
  Store store_{atoms_};
  SolveStatus status_ = SolveStatus::Exhausted;
  std::uint64_t steps_ = 0;
  std::vector<PredicateIndicator> limit_chain_;
  std::vector<RuntimeError> unknowns_;
  std::string output_;

 private:
  void load(const Program& program);
  ClauseCode compile(const Clause& clause, std::int32_t source);

  bool run();
  bool backtrack();
  bool call(const Goal& g);
  bool call_user(const Goal& g, Idx t, const Cell& c, std::uint32_t pred);
  bool try_clause(std::uint32_t pred, std::uint32_t clause, Idx goal, std::int32_t cont, std::uint32_t barrier,
                  std::int32_t parent);
  bool call_builtin(Builtin b, const Goal& g, const Cell& c);
  std::uint32_t find_next(const Predicate& p, std::uint32_t from, const IndexKey& key) const;

  std::int32_t push_goal(GoalKind kind, Idx term, std::uint32_t barrier, std::int32_t next, std::int32_t frame,
                         std::uint32_t aux = 0);
  ChoicePoint& push_cp(CpKind kind);
  void restore(const ChoicePoint& cp);
  void pop_cp();
  void cut_to(std::uint32_t height);
  void update_boundary() { store_.boundary = cps_.empty() ? 0 : cps_.back().heap; }

  void step();
  void check_depth(const Goal& g);
  Idx arg(const Cell& c, std::uint32_t k) const { return store_.deref(c.ref + k); }
  Number eval(Idx expr);
  std::int64_t int_arg(Idx i);
  bool unify_cell(Idx target, const Cell& value);
  std::string render(Idx t, bool quoted) const;
  bool format(Idx fmt, Idx args);

  void record_unknown(const Goal& g, const PredicateIndicator& pi);
  [[noreturn]] void raise(const Goal& g, RuntimeError::Kind kind, std::string message, std::string_view name,
                          std::size_t arity);
  std::vector<PredicateIndicator> chain_of(std::int32_t frame) const;
  std::optional<SourceSpan> locate(std::int32_t frame, std::string_view name, std::size_t arity,
                                   Origin& origin) const;
  void trace(TracePort port, std::int32_t frame, Idx goal);

  std::vector<Predicate> preds_;
  std::unordered_map<std::uint64_t, std::uint32_t> pred_index_;
  std::unordered_map<std::uint64_t, Builtin> builtins_;
  std::vector<Clause> sources_;
  std::set<std::uint64_t> unknown_seen_;

  Term query_;
  std::vector<std::pair<std::string, std::pair<int, Idx>>> qvars_;
  int fresh_id_base_ = 0;
  EngineLimits limits_;
  std::vector<Goal> goals_;
  std::int32_t goal_top_ = -1;
  std::vector<ChoicePoint> cps_;
  std::vector<CallFrame> frames_;
  std::vector<std::vector<Template>> findalls_;
  bool started_ = false;
  bool finished_ = true;
};

Machine::Machine(const Program& program, EngineOptions options) : options_(std::move(options)) {
  store_.occurs_check = options_.occurs_check;
  for (const auto& b : builtin_specs())
    builtins_.emplace(pred_key(atoms_.intern(b.name), static_cast<std::uint32_t>(b.arity)), b.id);
  load(program);
}

void Machine::load(const Program& program) {
  auto add = [&](const Clause& clause, std::int32_t source) {
    PredicateIndicator pi = clause.indicator();
    auto key = pred_key(atoms_.intern(pi.name), static_cast<std::uint32_t>(pi.arity));
    auto it = pred_index_.find(key);
    if (it == pred_index_.end()) {
      it = pred_index_.emplace(key, static_cast<std::uint32_t>(preds_.size())).first;
      preds_.push_back(Predicate{pi, {}});
    }
    preds_[it->second].clauses.push_back(compile(clause, source));
  };
  for (const Clause& clause : program.clauses()) {
    sources_.push_back(clause);
    add(clause, static_cast<std::int32_t>(sources_.size() - 1));
  }
  for (const Clause& clause : library_program().clauses()) {
    PredicateIndicator pi = clause.indicator();
    if (pi.name.front() != '$' && program.defines(pi)) continue;
    add(clause, -1);
  }
}

ClauseCode Machine::compile(const Clause& clause, std::int32_t source) {
  ClauseCode cc;
  std::map<int, Idx> vars;
  CellBuilder builder(cc.tpl.cells, atoms_);
  cc.head = builder.build(clause.head, vars);
  if (!clause.body.empty()) cc.body = builder.build(clause.body_term(), vars);
  if (!clause.head.args.empty()) {
    const Term& a = clause.head.args[0];
    switch (a.kind) {
      case Term::Kind::Var: break;
      case Term::Kind::Atom: cc.key.kind = KeyKind::Atom; cc.key.functor = atoms_.intern(a.name); break;
      case Term::Kind::Integer: cc.key.kind = KeyKind::Int; cc.key.i = a.int_value; break;
      case Term::Kind::Float: cc.key.kind = KeyKind::Float; cc.key.f = a.float_value; break;
      case Term::Kind::Compound:
        cc.key.kind = KeyKind::Functor;
        cc.key.functor = atoms_.intern(a.name);
        cc.key.arity = static_cast<std::uint32_t>(a.args.size());
        break;
    }
  }
  cc.source = source;
  return cc;
}

void Machine::start(const Term& query, const EngineLimits& limits) {
  limits.validate();
  limits_ = limits;
  store_.heap.clear();
  store_.trail.clear();
  store_.boundary = 0;
  goals_.clear();
  cps_.clear();
  frames_.clear();
  findalls_.clear();
  steps_ = 0;
  status_ = SolveStatus::Exhausted;
  limit_chain_.clear();
  query_ = query;
  qvars_.clear();

  std::map<int, Idx> vars;
  Idx root = store_.build(query, vars);
  fresh_id_base_ = 0;
  for (const auto& [id, cell] : vars) fresh_id_base_ = std::max(fresh_id_base_, id + 1);
  for (const Term* v : variables_of(query)) {
    if (v->name.empty() || v->name.front() == '_') continue;
    qvars_.push_back({v->name, {v->var_id, vars.at(v->var_id)}});
  }
  goal_top_ = -1;
  goal_top_ = push_goal(GoalKind::Call, root, 0, -1, -1);
  started_ = false;
  finished_ = false;
}

std::optional<Answer> Machine::next() {
  if (finished_) return std::nullopt;
  bool ok = false;
  try {
    if (!started_) {
      started_ = true;
      ok = run();
    } else {
      ok = backtrack() && run();
    }
  } catch (const LimitHit& hit) {
    status_ = hit.status;
    finished_ = true;
    return std::nullopt;
  } catch (...) {
    finished_ = true;
    throw;
  }
  if (!ok) {
    status_ = SolveStatus::Exhausted;
    finished_ = true;
    return std::nullopt;
  }

  Answer answer;
  answer.open_alternatives = !cps_.empty();
  std::map<Idx, std::string> names;
  for (const auto& [name, v] : qvars_) {
    Idx d = store_.deref(v.second);
    if (store_.is_unbound(d)) names.emplace(d, name);
  }
  // Answer variables get query ids when named after one, else ids above every query id.
  std::map<int, int> ids;
  for (const auto& [name, v] : qvars_) {
    Idx d = store_.deref(v.second);
    if (store_.is_unbound(d) && names.at(d) == name) ids.emplace(static_cast<int>(d), v.first);
  }
  std::function<void(Term&)> renumber = [&](Term& t) {
    if (t.is_var()) {
      auto it = ids.find(t.var_id);
      if (it == ids.end()) it = ids.emplace(t.var_id, fresh_id_base_ + static_cast<int>(ids.size())).first;
      t.var_id = it->second;
      return;
    }
    for (Term& a : t.args) renumber(a);
  };
  for (const auto& [name, v] : qvars_) {
    Term value = store_.to_term(v.second, names);
    renumber(value);
    answer.bindings.push_back({name, v.first, std::move(value)});
  }
  if (cps_.empty()) {
    status_ = SolveStatus::Exhausted;
    finished_ = true;
  } else {
    status_ = SolveStatus::ChoicePointsRemain;
  }
  return answer;
}

std::int32_t Machine::push_goal(GoalKind kind, Idx term, std::uint32_t barrier, std::int32_t next,
                                std::int32_t frame, std::uint32_t aux) {
  std::uint32_t depth = (next < 0 ? 0 : goals_[static_cast<std::size_t>(next)].depth) + 1;
  goals_.push_back(Goal{kind, term, barrier, next, depth, frame, aux});
  goal_top_ = static_cast<std::int32_t>(goals_.size() - 1);
  return goal_top_;
}

ChoicePoint& Machine::push_cp(CpKind kind) {
  ChoicePoint cp;
  cp.kind = kind;
  cp.heap = static_cast<std::uint32_t>(store_.heap.size());
  cp.trail = static_cast<std::uint32_t>(store_.trail.size());
  cp.goals = static_cast<std::uint32_t>(goals_.size());
  cp.frames = static_cast<std::uint32_t>(frames_.size());
  cps_.push_back(cp);
  update_boundary();
  return cps_.back();
}

void Machine::restore(const ChoicePoint& cp) {
  store_.undo_to(cp.trail);
  store_.heap.resize(cp.heap);
  goals_.resize(cp.goals);
  frames_.resize(cp.frames);
}

void Machine::pop_cp() {
  if (cps_.back().kind == CpKind::Findall) findalls_.resize(cps_.back().findall);
  cps_.pop_back();
  update_boundary();
}

void Machine::cut_to(std::uint32_t height) {
  while (cps_.size() > height) pop_cp();
}

void Machine::step() {
  if (steps_ >= limits_.max_steps) throw LimitHit{SolveStatus::StepLimitReached};
  ++steps_;
  if ((steps_ & 4095u) == 0 && options_.cancel && options_.cancel->load(std::memory_order_relaxed))
    throw EngineCancelled();
}

void Machine::check_depth(const Goal& g) {
  if (g.depth > limits_.max_depth) throw LimitHit{SolveStatus::DepthLimitReached};
}

bool Machine::run() {
  while (true) {
    if (goal_top_ < 0) return true;
    const Goal g = goals_[static_cast<std::size_t>(goal_top_)];
    goal_top_ = g.next;
    bool ok = true;
    switch (g.kind) {
      case GoalKind::Call:
        try {
          ok = call(g);
        } catch (const LimitHit&) {
          limit_chain_ = chain_of(g.frame);
          throw;
        }
        break;
      case GoalKind::CutTo:
        cut_to(g.aux);
        break;
      case GoalKind::NafFail:
        cut_to(g.aux);
        ok = false;
        break;
      case GoalKind::Collect:
        findalls_[g.aux].push_back(store_.copy_out(g.term));
        ok = false;
        break;
      case GoalKind::Exit:
        trace(TracePort::Exit, g.frame, g.term);
        break;
    }
    if (!ok && !backtrack()) return false;
  }
}

bool Machine::backtrack() {
  while (!cps_.empty()) {
    ChoicePoint& cp = cps_.back();
    restore(cp);
    switch (cp.kind) {
      case CpKind::Clauses: {
        std::uint32_t pred = cp.pred;
        std::uint32_t clause = cp.next_clause;
        Idx goal = cp.term;
        std::int32_t cont = cp.cont;
        std::int32_t parent = cp.frame;
        auto barrier = static_cast<std::uint32_t>(cps_.size() - 1);
        const Predicate& p = preds_[pred];
        IndexKey key;
        const Cell gc = store_.heap[goal];
        if (gc.tag == Tag::Struct) key = key_of_cell(store_.heap[arg(gc, 0)]);
        std::uint32_t following = find_next(p, clause + 1, key);
        if (following == kNone) pop_cp();
        else cp.next_clause = following;
        if (options_.trace) trace(TracePort::Redo, parent, goal);
        goal_top_ = cont;
        if (try_clause(pred, clause, goal, cont, barrier, parent)) return true;
        if (options_.trace && following == kNone) trace(TracePort::Fail, parent, goal);
        break;
      }
      case CpKind::Alternative: {
        Idx alt = cp.term;
        std::uint32_t barrier = cp.barrier;
        std::int32_t cont = cp.cont;
        std::int32_t frame = cp.frame;
        pop_cp();
        goal_top_ = cont;
        push_goal(GoalKind::Call, alt, barrier, cont, frame);
        return true;
      }
      case CpKind::NafSucceed: {
        goal_top_ = cp.cont;
        pop_cp();
        return true;
      }
      case CpKind::Findall: {
        std::vector<Template> results = std::move(findalls_[cp.findall]);
        Idx target = cp.term;
        std::int32_t cont = cp.cont;
        pop_cp();
        std::vector<Idx> items;
        items.reserve(results.size());
        for (const auto& r : results) items.push_back(store_.instantiate(r));
        Idx list = store_.make_list(items);
        if (store_.unify(target, list)) {
          goal_top_ = cont;
          return true;
        }
        break;
      }
      case CpKind::Between: {
        std::int64_t value = cp.lo;
        Idx var = cp.term;
        std::int32_t cont = cp.cont;
        if (cp.lo >= cp.hi) pop_cp();
        else ++cp.lo;
        store_.bind(var, store_.push(Cell::make_int(value)));
        goal_top_ = cont;
        return true;
      }
    }
  }
  return false;
}

std::uint32_t Machine::find_next(const Predicate& p, std::uint32_t from, const IndexKey& key) const {
  for (auto i = from; i < p.clauses.size(); ++i)
    if (p.clauses[i].key.compatible(key)) return i;
  return kNone;
}

bool Machine::call(const Goal& g) {
  Idx t = store_.deref(g.term);
  const Cell c = store_.heap[t];
  if (c.tag == Tag::Ref) {
    step();
    raise(g, RuntimeError::Kind::Instantiation, "Arguments are not sufficiently instantiated", "call", 1);
  }
  if (c.tag == Tag::Int || c.tag == Tag::Float) {
    step();
    raise(g, RuntimeError::Kind::TypeError, "Type error: `callable' expected, found `" + render(t, true) + "'",
          "call", 1);
  }
  std::uint32_t arity = c.tag == Tag::Struct ? c.arity : 0;
  if (c.functor == atoms_.comma && arity == 2) {
    std::int32_t rest = push_goal(GoalKind::Call, c.ref + 1, g.barrier, g.next, g.frame);
    push_goal(GoalKind::Call, c.ref, g.barrier, rest, g.frame);
    return true;
  }
  if (c.functor == atoms_.true_ && arity == 0) return true;

  step();
  if (store_.heap.size() > options_.max_heap_cells)
    raise(g, RuntimeError::Kind::ResourceLimit, "Resource error: memory limit exceeded", atoms_.name(c.functor),
          arity);

  auto key = pred_key(c.functor, arity);
  if (auto b = builtins_.find(key); b != builtins_.end()) {
    if (options_.trace) trace(TracePort::Call, g.frame, t);
    bool ok;
    try {
      ok = call_builtin(b->second, g, c);
    } catch (const BuiltinError& e) {
      raise(g, e.kind, e.message, atoms_.name(c.functor), arity);
    } catch (const ArithError& e) {
      raise(g, e.kind, e.message, atoms_.name(c.functor), arity);
    }
    if (options_.trace) trace(ok ? TracePort::Exit : TracePort::Fail, g.frame, t);
    return ok;
  }
  auto p = pred_index_.find(key);
  if (p == pred_index_.end()) {
    record_unknown(g, {atoms_.name(c.functor), arity});
    return false;
  }
  check_depth(g);
  return call_user(g, t, c, p->second);
}

bool Machine::call_user(const Goal& g, Idx t, const Cell& c, std::uint32_t pred) {
  const Predicate& p = preds_[pred];
  IndexKey key;
  if (c.tag == Tag::Struct) key = key_of_cell(store_.heap[arg(c, 0)]);
  if (options_.trace) trace(TracePort::Call, g.frame, t);
  std::uint32_t first = find_next(p, 0, key);
  if (first == kNone) {
    if (options_.trace) trace(TracePort::Fail, g.frame, t);
    return false;
  }
  std::uint32_t second = find_next(p, first + 1, key);
  auto barrier = static_cast<std::uint32_t>(cps_.size());
  if (second != kNone) {
    ChoicePoint& cp = push_cp(CpKind::Clauses);
    cp.pred = pred;
    cp.next_clause = second;
    cp.term = t;
    cp.cont = g.next;
    cp.frame = g.frame;
  }
  if (try_clause(pred, first, t, g.next, barrier, g.frame)) return true;
  if (options_.trace && second == kNone) trace(TracePort::Fail, g.frame, t);
  return false;
}

bool Machine::try_clause(std::uint32_t pred, std::uint32_t clause, Idx goal, std::int32_t cont,
                         std::uint32_t barrier, std::int32_t parent) {
  const ClauseCode& cc = preds_[pred].clauses[clause];
  Idx base = store_.instantiate_cells(cc.tpl.cells);
  if (!store_.unify(base + cc.head, goal)) return false;
  std::uint32_t depth = parent < 0 ? 1 : frames_[static_cast<std::size_t>(parent)].depth + 1;
  frames_.push_back(CallFrame{pred, parent, cc.source, depth});
  auto frame = static_cast<std::int32_t>(frames_.size() - 1);
  goal_top_ = cont;
  if (options_.trace) push_goal(GoalKind::Exit, goal, 0, goal_top_, frame);
  if (cc.body != kNone) push_goal(GoalKind::Call, base + cc.body, barrier, goal_top_, frame);
  return true;
}

Number Machine::eval(Idx expr) { return evaluate(store_, expr); }

std::int64_t Machine::int_arg(Idx i) {
  const Cell& c = store_.heap[i];
  if (c.tag == Tag::Ref) instantiation_error();
  if (c.tag != Tag::Int) type_error("integer", render(i, true));
  return c.i;
}

bool Machine::unify_cell(Idx target, const Cell& value) { return store_.unify(target, store_.push(value)); }

std::string Machine::render(Idx t, bool quoted) const {
  WriteOptions opts;
  opts.quoted = quoted;
  return format_term(store_.to_term(t), opts);
}

bool Machine::format(Idx fmt, Idx args) {
  const Cell& fc = store_.heap[fmt];
  if (fc.tag != Tag::Atom) type_error("text", render(fmt, true));
  std::string text = atoms_.name(fc.functor);
  std::vector<Idx> items;
  if (args != kNone && !store_.list_items(args, items)) items = {args};
  std::size_t next_arg = 0;
  auto take = [&]() -> Idx {
    if (next_arg >= items.size())
      throw BuiltinError{RuntimeError::Kind::TypeError, "format/2: not enough arguments"};
    return items[next_arg++];
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch != '~' || i + 1 == text.size()) {
      output_ += ch;
      continue;
    }
    char d = text[++i];
    switch (d) {
      case 'w': case 'a': case 'd': output_ += render(take(), false); break;
      case 'p': case 'q': output_ += render(take(), true); break;
      case 'n': output_ += '\n'; break;
      case '~': output_ += '~'; break;
      default: throw BuiltinError{RuntimeError::Kind::TypeError, std::string("format/2: unknown directive ~") + d};
    }
  }
  return true;
}

bool Machine::call_builtin(Builtin b, const Goal& g, const Cell& c) {
  auto a = [&](std::uint32_t k) { return arg(c, k); };
  auto compare_arith = [&](auto pred) {
    return pred(compare_numbers(eval(c.ref), eval(c.ref + 1)));
  };
  switch (b) {
    case Builtin::True: return true;
    case Builtin::Fail: return false;
    case Builtin::Cut: cut_to(g.barrier); return true;
    case Builtin::Unify: return store_.unify(c.ref, c.ref + 1);
    case Builtin::NotUnify: return !store_.unifiable(c.ref, c.ref + 1);
    case Builtin::Identical: return store_.compare(c.ref, c.ref + 1) == 0;
    case Builtin::NotIdentical: return store_.compare(c.ref, c.ref + 1) != 0;
    case Builtin::Is: {
      Number n = eval(c.ref + 1);
      return unify_cell(c.ref, number_cell(n));
    }
    case Builtin::ArithEq: return compare_arith([](int r) { return r == 0; });
    case Builtin::ArithNe: return compare_arith([](int r) { return r != 0; });
    case Builtin::Less: return compare_arith([](int r) { return r < 0; });
    case Builtin::Greater: return compare_arith([](int r) { return r > 0; });
    case Builtin::LessEq: return compare_arith([](int r) { return r <= 0; });
    case Builtin::GreaterEq: return compare_arith([](int r) { return r >= 0; });
    case Builtin::Conj: return true;  // handled in call()
    case Builtin::Not: {
      auto height = static_cast<std::uint32_t>(cps_.size());
      ChoicePoint& cp = push_cp(CpKind::NafSucceed);
      cp.cont = g.next;
      std::int32_t fail = push_goal(GoalKind::NafFail, kNone, 0, g.next, g.frame, height);
      push_goal(GoalKind::Call, c.ref, height + 1, fail, g.frame);
      return true;
    }
    case Builtin::Disj: {
      Idx lhs = a(0);
      const Cell lc = store_.heap[lhs];
      auto height = static_cast<std::uint32_t>(cps_.size());
      ChoicePoint& cp = push_cp(CpKind::Alternative);
      cp.term = c.ref + 1;
      cp.barrier = g.barrier;
      cp.cont = g.next;
      cp.frame = g.frame;
      if (lc.tag == Tag::Struct && lc.functor == atoms_.arrow && lc.arity == 2) {
        std::int32_t then = push_goal(GoalKind::Call, lc.ref + 1, g.barrier, g.next, g.frame);
        std::int32_t commit = push_goal(GoalKind::CutTo, kNone, 0, then, g.frame, height);
        push_goal(GoalKind::Call, lc.ref, height + 1, commit, g.frame);
      } else {
        push_goal(GoalKind::Call, c.ref, g.barrier, g.next, g.frame);
      }
      return true;
    }
    case Builtin::IfThen: {
      auto height = static_cast<std::uint32_t>(cps_.size());
      std::int32_t then = push_goal(GoalKind::Call, c.ref + 1, g.barrier, g.next, g.frame);
      std::int32_t commit = push_goal(GoalKind::CutTo, kNone, 0, then, g.frame, height);
      push_goal(GoalKind::Call, c.ref, height, commit, g.frame);
      return true;
    }
    case Builtin::Call: {
      Idx target = a(0);
      const Cell tc = store_.heap[target];
      if (tc.tag == Tag::Ref) instantiation_error();
      if (tc.tag != Tag::Atom && tc.tag != Tag::Struct) type_error("callable", render(target, true));
      Idx goal = target;
      if (c.arity > 1) {
        std::uint32_t extra = c.arity - 1;
        std::uint32_t base_arity = tc.tag == Tag::Struct ? tc.arity : 0;
        goal = store_.new_struct(tc.functor, base_arity + extra);
        const Cell& gs = store_.heap[goal];
        Idx args = gs.ref;
        for (std::uint32_t k = 0; k < base_arity; ++k) store_.heap[args + k] = Cell::make_ref(tc.ref + k);
        for (std::uint32_t k = 0; k < extra; ++k) store_.heap[args + base_arity + k] = Cell::make_ref(c.ref + 1 + k);
      }
      push_goal(GoalKind::Call, goal, static_cast<std::uint32_t>(cps_.size()), g.next, g.frame);
      return true;
    }
    case Builtin::Findall: {
      auto index = static_cast<std::uint32_t>(findalls_.size());
      ChoicePoint& cp = push_cp(CpKind::Findall);
      cp.term = c.ref + 2;
      cp.cont = g.next;
      cp.findall = index;
      findalls_.emplace_back();
      std::int32_t collect = push_goal(GoalKind::Collect, c.ref, 0, g.next, g.frame, index);
      goals_[static_cast<std::size_t>(collect)].next = -1;
      push_goal(GoalKind::Call, c.ref + 1, static_cast<std::uint32_t>(cps_.size()), collect, g.frame);
      return true;
    }
    case Builtin::Between: {
      std::int64_t lo = int_arg(a(0));
      Idx hi_idx = a(1);
      std::int64_t hi;
      const Cell& hc = store_.heap[hi_idx];
      if (hc.tag == Tag::Atom && (atoms_.name(hc.functor) == "inf" || atoms_.name(hc.functor) == "infinite"))
        hi = std::numeric_limits<std::int64_t>::max();
      else
        hi = int_arg(hi_idx);
      Idx x = a(2);
      const Cell& xc = store_.heap[x];
      if (xc.tag == Tag::Int) return lo <= xc.i && xc.i <= hi;
      if (xc.tag != Tag::Ref) type_error("integer", render(x, true));
      if (lo > hi) return false;
      if (lo < hi) {
        ChoicePoint& cp = push_cp(CpKind::Between);
        cp.lo = lo + 1;
        cp.hi = hi;
        cp.term = x;
        cp.cont = g.next;
      }
      return unify_cell(x, Cell::make_int(lo));
    }
    case Builtin::Var: return store_.heap[a(0)].tag == Tag::Ref;
    case Builtin::Nonvar: return store_.heap[a(0)].tag != Tag::Ref;
    case Builtin::Atom: return store_.heap[a(0)].tag == Tag::Atom;
    case Builtin::Number: {
      Tag tag = store_.heap[a(0)].tag;
      return tag == Tag::Int || tag == Tag::Float;
    }
    case Builtin::Integer: return store_.heap[a(0)].tag == Tag::Int;
    case Builtin::Float: return store_.heap[a(0)].tag == Tag::Float;
    case Builtin::Atomic: {
      Tag tag = store_.heap[a(0)].tag;
      return tag != Tag::Ref && tag != Tag::Struct;
    }
    case Builtin::Compound: return store_.heap[a(0)].tag == Tag::Struct;
    case Builtin::Callable: {
      Tag tag = store_.heap[a(0)].tag;
      return tag == Tag::Atom || tag == Tag::Struct;
    }
    case Builtin::IsList: {
      std::vector<Idx> items;
      return store_.list_items(a(0), items);
    }
    case Builtin::Msort:
    case Builtin::Sort: {
      std::vector<Idx> items;
      if (!store_.list_items(a(0), items)) {
        // Partial lists are an instantiation error; anything else a type error.
        Idx tail = a(0);
        while (true) {
          const Cell& tc = store_.heap[tail];
          if (tc.tag != Tag::Struct || tc.functor != atoms_.dot || tc.arity != 2) break;
          tail = store_.deref(tc.ref + 1);
        }
        if (store_.heap[tail].tag == Tag::Ref) instantiation_error();
        type_error("list", render(a(0), true));
      }
      std::stable_sort(items.begin(), items.end(), [&](Idx x, Idx y) { return store_.compare(x, y) < 0; });
      if (b == Builtin::Sort)
        items.erase(std::unique(items.begin(), items.end(), [&](Idx x, Idx y) { return store_.compare(x, y) == 0; }),
                    items.end());
      return store_.unify(c.ref + 1, store_.make_list(items));
    }
    case Builtin::Compare: {
      int r = store_.compare(c.ref + 1, c.ref + 2);
      AtomId order = r < 0 ? atoms_.less : (r > 0 ? atoms_.greater : atoms_.eq);
      return unify_cell(c.ref, Cell::make_atom(order));
    }
    case Builtin::TermLess: return store_.compare(c.ref, c.ref + 1) < 0;
    case Builtin::TermGreater: return store_.compare(c.ref, c.ref + 1) > 0;
    case Builtin::TermLessEq: return store_.compare(c.ref, c.ref + 1) <= 0;
    case Builtin::TermGreaterEq: return store_.compare(c.ref, c.ref + 1) >= 0;
    case Builtin::Write: output_ += render(c.ref, false); return true;
    case Builtin::Print: output_ += render(c.ref, true); return true;
    case Builtin::Writeln: output_ += render(c.ref, false) + "\n"; return true;
    case Builtin::Nl: output_ += "\n"; return true;
    case Builtin::Format: return format(a(0), c.arity == 2 ? a(1) : kNone);
    case Builtin::Functor: {
      Idx term = a(0);
      const Cell tc = store_.heap[term];
      if (tc.tag == Tag::Struct)
        return unify_cell(c.ref + 1, Cell::make_atom(tc.functor)) &&
               unify_cell(c.ref + 2, Cell::make_int(tc.arity));
      if (tc.tag != Tag::Ref)
        return store_.unify(c.ref + 1, term) && unify_cell(c.ref + 2, Cell::make_int(0));
      Idx name = a(1);
      std::int64_t n = int_arg(a(2));
      const Cell nc = store_.heap[name];
      if (nc.tag == Tag::Ref) instantiation_error();
      if (n == 0) return store_.unify(term, name);
      if (nc.tag != Tag::Atom) type_error("atom", render(name, true));
      if (n < 0) type_error("not_less_than_zero", std::to_string(n));
      return store_.unify(term, store_.new_struct(nc.functor, static_cast<std::uint32_t>(n)));
    }
    case Builtin::Arg: {
      std::int64_t n = int_arg(a(0));
      Idx term = a(1);
      const Cell tc = store_.heap[term];
      if (tc.tag == Tag::Ref) instantiation_error();
      if (tc.tag != Tag::Struct) type_error("compound", render(term, true));
      if (n < 1 || n > static_cast<std::int64_t>(tc.arity)) return false;
      return store_.unify(c.ref + 2, tc.ref + static_cast<Idx>(n - 1));
    }
    case Builtin::Univ: {
      Idx term = a(0);
      const Cell tc = store_.heap[term];
      if (tc.tag == Tag::Struct) {
        std::vector<Idx> items{store_.push(Cell::make_atom(tc.functor))};
        for (std::uint32_t k = 0; k < tc.arity; ++k) items.push_back(tc.ref + k);
        return store_.unify(c.ref + 1, store_.make_list(items));
      }
      if (tc.tag != Tag::Ref) return store_.unify(c.ref + 1, store_.make_list({term}));
      std::vector<Idx> items;
      if (!store_.list_items(a(1), items) || items.empty()) instantiation_error();
      Idx head = store_.deref(items[0]);
      const Cell hc = store_.heap[head];
      if (items.size() == 1) return store_.unify(term, head);
      if (hc.tag == Tag::Ref) instantiation_error();
      if (hc.tag != Tag::Atom) type_error("atom", render(head, true));
      Idx s = store_.new_struct(hc.functor, static_cast<std::uint32_t>(items.size() - 1));
      Idx args = store_.heap[s].ref;
      for (std::size_t k = 1; k < items.size(); ++k) store_.heap[args + k - 1] = Cell::make_ref(items[k]);
      return store_.unify(term, s);
    }
    case Builtin::CopyTerm: {
      Template tpl = store_.copy_out(c.ref);
      return store_.unify(c.ref + 1, store_.instantiate(tpl));
    }
    case Builtin::Succ: {
      const Cell xc = store_.heap[a(0)];
      if (xc.tag == Tag::Int) {
        if (xc.i < 0) type_error("not_less_than_zero", std::to_string(xc.i));
        return unify_cell(c.ref + 1, Cell::make_int(xc.i + 1));
      }
      if (xc.tag != Tag::Ref) type_error("integer", render(a(0), true));
      std::int64_t y = int_arg(a(1));
      if (y <= 0) return false;
      return unify_cell(c.ref, Cell::make_int(y - 1));
    }
    case Builtin::Plus: {
      const Cell xc = store_.heap[a(0)], yc = store_.heap[a(1)], zc = store_.heap[a(2)];
      if (xc.tag == Tag::Int && yc.tag == Tag::Int) return unify_cell(c.ref + 2, Cell::make_int(xc.i + yc.i));
      if (xc.tag == Tag::Int && zc.tag == Tag::Int) return unify_cell(c.ref + 1, Cell::make_int(zc.i - xc.i));
      if (yc.tag == Tag::Int && zc.tag == Tag::Int) return unify_cell(c.ref, Cell::make_int(zc.i - yc.i));
      instantiation_error();
    }
  }
  return false;
}

void Machine::record_unknown(const Goal& g, const PredicateIndicator& pi) {
  auto key = pred_key(atoms_.intern(pi.name), static_cast<std::uint32_t>(pi.arity));
  if (!unknown_seen_.insert(key).second) return;
  RuntimeError err;
  err.kind = RuntimeError::Kind::UnknownPredicate;
  err.message = "Unknown procedure: " + pi.str();
  err.predicate = pi;
  err.culprit = locate(g.frame, pi.name, pi.arity, err.origin);
  err.call_chain = chain_of(g.frame);
  unknowns_.push_back(std::move(err));
}

void Machine::raise(const Goal& g, RuntimeError::Kind kind, std::string message, std::string_view name,
                    std::size_t arity) {
  RuntimeError err;
  err.kind = kind;
  err.message = std::move(message);
  err.culprit = locate(g.frame, name, arity, err.origin);
  err.call_chain = chain_of(g.frame);
  throw EngineError(std::move(err), steps_);
}

std::vector<PredicateIndicator> Machine::chain_of(std::int32_t frame) const {
  std::vector<PredicateIndicator> chain;
  while (frame >= 0 && chain.size() < kMaxChain) {
    const CallFrame& f = frames_[static_cast<std::size_t>(frame)];
    chain.push_back(preds_[f.pred].pi);
    frame = f.parent;
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

namespace {

const Term* find_call(const Term& t, std::string_view name, std::size_t arity) {
  if (!t.is_callable()) return nullptr;
  if (t.name == name && t.args.size() == arity) return &t;
  bool control = t.is_compound(",", 2) || t.is_compound(";", 2) || t.is_compound("->", 2) ||
                 t.is_compound("\\+", 1) || t.is_compound("findall", 3) || t.name == "call";
  if (!control) return nullptr;
  for (const Term& a : t.args)
    if (const Term* hit = find_call(a, name, arity)) return hit;
  return nullptr;
}

}  // namespace

std::optional<SourceSpan> Machine::locate(std::int32_t frame, std::string_view name, std::size_t arity,
                                          Origin& origin) const {
  std::string callee(name);
  while (frame >= 0 && frames_[static_cast<std::size_t>(frame)].source < 0) {
    const CallFrame& f = frames_[static_cast<std::size_t>(frame)];
    callee = preds_[f.pred].pi.name;
    arity = preds_[f.pred].pi.arity;
    frame = f.parent;
  }
  if (frame < 0) {
    origin = Origin::Query;
    if (const Term* hit = find_call(query_, callee, arity)) return hit->span;
    return std::nullopt;
  }
  const Clause& clause = sources_[static_cast<std::size_t>(frames_[static_cast<std::size_t>(frame)].source)];
  origin = clause.origin;
  for (const Term& goal : clause.body)
    if (const Term* hit = find_call(goal, callee, arity)) return hit->span;
  return clause.span;
}

void Machine::trace(TracePort port, std::int32_t frame, Idx goal) {
  if (!options_.trace) return;
  std::size_t depth = frame < 0 ? 0 : frames_[static_cast<std::size_t>(frame)].depth;
  options_.trace(TraceEvent{port, depth, render(goal, true)});
}

Engine::Engine(const Program& program, EngineOptions options)
    : machine_(std::make_unique<Machine>(program, std::move(options))) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

void Engine::start(const Term& query, const EngineLimits& limits) { machine_->start(query, limits); }
std::optional<Answer> Engine::next() { return machine_->next(); }
bool Engine::has_more() const { return machine_->has_more(); }
SolveStatus Engine::status() const { return machine_->status_; }
std::uint64_t Engine::steps_used() const { return machine_->steps_; }
std::vector<PredicateIndicator> Engine::limit_call_chain() const { return machine_->limit_chain_; }
const std::vector<RuntimeError>& Engine::unknown_predicates() const { return machine_->unknowns_; }
const std::string& Engine::output() const { return machine_->output_; }

SolveOutcome Engine::solve(const Term& query, const EngineLimits& limits) {
  start(query, limits);
  SolveOutcome out;
  while (out.solutions.size() < limits.max_solutions) {
    auto answer = next();
    if (!answer) break;
    out.solutions.push_back(std::move(*answer));
  }
  out.status = status();
  out.steps_used = steps_used();
  out.limit_call_chain = limit_call_chain();
  return out;
}

SolveOutcome solve(const Program& program, const Term& query, const EngineLimits& limits, EngineOptions options) {
  Engine engine(program, std::move(options));
  return engine.solve(query, limits);
}

Number eval_arith(const Term& expr, const Substitution& s) {
  AtomTable atoms;
  Store store(atoms);
  Idx root = store.build(s.apply(expr));
  try {
    return evaluate(store, root);
  } catch (const ArithError& e) {
    RuntimeError err;
    err.kind = e.kind;
    err.message = e.message;
    throw EngineError(std::move(err), 0);
  }
}

}  // namespace prologian
