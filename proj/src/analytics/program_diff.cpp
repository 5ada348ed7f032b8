#include "prologian/analytics/program_diff.hpp"

#include <algorithm>
#include <map>

#include "prologian/analytics/tree_diff.hpp"
#include "prologian/analyzers/suggest.hpp"
#include "prologian/syntax/parser.hpp"
#include "prologian/syntax/writer.hpp"

namespace prologian {

std::string TermPosition::str() const {
  std::string out = part == Part::Head ? "head" : "goal " + std::to_string(goal + 1);
  for (std::size_t a : args) out += " > argument " + std::to_string(a);
  return out;
}

const Term* term_at(const Clause& clause, const TermPosition& pos) {
  const Term* cur = nullptr;
  if (pos.part == TermPosition::Part::Head) {
    cur = &clause.head;
  } else {
    if (pos.goal >= clause.body.size()) return nullptr;
    cur = &clause.body[pos.goal];
  }
  for (std::size_t a : pos.args) {
    if (!cur->is_compound() || a == 0 || a > cur->args.size()) return nullptr;
    cur = &cur->args[a - 1];
  }
  return cur;
}

std::string_view to_string(EditKind k) {
  switch (k) {
    case EditKind::Replace: return "Replace";
    case EditKind::Relabel: return "Relabel";
    case EditKind::Insert: return "Insert";
    case EditKind::Delete: return "Delete";
    case EditKind::Move: return "Move";
  }
  return "?";
}

std::string_view to_string(ClauseEditKind k) {
  switch (k) {
    case ClauseEditKind::ClauseAdded: return "ClauseAdded";
    case ClauseEditKind::ClauseRemoved: return "ClauseRemoved";
    case ClauseEditKind::ClauseModified: return "ClauseModified";
  }
  return "?";
}

std::string_view to_string(DiffKind k) {
  switch (k) {
    case DiffKind::Added: return "Added";
    case DiffKind::Removed: return "Removed";
    case DiffKind::Modified: return "Modified";
  }
  return "?";
}

std::string EditOp::str() const {
  std::string out(to_string(kind));
  switch (kind) {
    case EditKind::Replace:
      out += " at " + new_pos->str() + ": " + format_term(*before) + " -> " + format_term(*after);
      break;
    case EditKind::Relabel:
      out += " at " + new_pos->str() + ": " + before->name + " -> " + after->name;
      break;
    case EditKind::Insert: out += " at " + new_pos->str() + ": " + format_term(*after); break;
    case EditKind::Delete: out += " at " + old_pos->str() + ": " + format_term(*before); break;
    case EditKind::Move:
      out += " " + format_term(*before) + " from " + old_pos->str() + " to " + new_pos->str();
      break;
  }
  return out;
}

std::string PredicateDiff::str() const {
  std::string out = std::string(to_string(kind)) + " " + predicate.str();
  if (renamed_from) out += " (renamed from " + renamed_from->str() + ")";
  return out;
}

namespace {

using Pos = TermPosition;

Pos child(Pos p, std::size_t k) {
  p.args.push_back(k);
  return p;
}

EditOp make_op(EditKind kind, std::optional<Pos> op, std::optional<Pos> np, std::optional<Term> before,
               std::optional<Term> after) {
  EditOp e;
  e.kind = kind;
  e.old_pos = std::move(op);
  e.new_pos = std::move(np);
  e.before = std::move(before);
  e.after = std::move(after);
  return e;
}

// Alignment of two sequences under `cost` (0 equal, 3 unrelated) with unit
// insertions and deletions. Pairs with cost 0 or 1 are matched.
struct Step {
  enum Kind { Match, Del, Ins } kind;
  std::size_t i, j;
};

template <class Cost>
std::vector<Step> align(std::size_t n, std::size_t m, Cost cost) {
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 1; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + cost(i - 1, j - 1), d[i - 1][j] + 1, d[i][j - 1] + 1});
  std::vector<Step> steps;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && cost(i - 1, j - 1) <= 1 && d[i][j] == d[i - 1][j - 1] + cost(i - 1, j - 1)) {
      steps.push_back({Step::Match, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      steps.push_back({Step::Del, i - 1, j});
      --i;
    } else {
      steps.push_back({Step::Ins, i, j - 1});
      --j;
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

bool args_equal(const Term& a, const Term& b) {
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!same_shape_by_name(a.args[k], b.args[k])) return false;
  return true;
}

int goal_cost(const Term& a, const Term& b) {
  if (same_shape_by_name(a, b)) return 0;
  if (a.is_callable() && b.is_callable()) {
    if (a.name == b.name) return 1;
    if (a.args.size() == b.args.size() && !a.args.empty() && args_equal(a, b)) return 1;
  }
  return 3;
}

int arg_cost(const Term& a, const Term& b) { return same_shape_by_name(a, b) ? 0 : 1; }

void term_edits(const Term& a, const Term& b, const Pos& pa, const Pos& pb, std::vector<EditOp>& out) {
  if (same_shape_by_name(a, b)) return;
  if (a.is_compound() && b.is_compound()) {
    if (a.args.size() == b.args.size()) {
      if (a.name != b.name) out.push_back(make_op(EditKind::Relabel, pa, pb, a, b));
      for (std::size_t k = 0; k < a.args.size(); ++k) term_edits(a.args[k], b.args[k], child(pa, k + 1), child(pb, k + 1), out);
      return;
    }
    if (a.name == b.name) {
      auto steps = align(a.args.size(), b.args.size(), [&](std::size_t i, std::size_t j) { return arg_cost(a.args[i], b.args[j]); });
      for (const Step& s : steps) {
        if (s.kind == Step::Match)
          term_edits(a.args[s.i], b.args[s.j], child(pa, s.i + 1), child(pb, s.j + 1), out);
        else if (s.kind == Step::Del)
          out.push_back(make_op(EditKind::Delete, child(pa, s.i + 1), std::nullopt, a.args[s.i], std::nullopt));
        else
          out.push_back(make_op(EditKind::Insert, std::nullopt, child(pb, s.j + 1), std::nullopt, b.args[s.j]));
      }
      return;
    }
  }
  out.push_back(make_op(EditKind::Replace, pa, pb, a, b));
}

Pos goal_pos(std::size_t g) { return Pos{Pos::Part::Body, g, {}}; }

// Same goals as a multiset, in a different order.
bool is_reordering(const std::vector<Term>& ob, const std::vector<Term>& nb) {
  if (ob.size() != nb.size()) return false;
  bool differs = false;
  std::vector<bool> used(nb.size(), false);
  for (std::size_t i = 0; i < ob.size(); ++i) {
    if (!same_shape_by_name(ob[i], nb[i])) differs = true;
    bool found = false;
    for (std::size_t j = 0; j < nb.size() && !found; ++j) {
      if (used[j] || !same_shape_by_name(ob[i], nb[j])) continue;
      used[j] = found = true;
    }
    if (!found) return false;
  }
  return differs;
}

// Goals outside a heaviest common subsequence move. A cut weighs less than
// other goals, so a swap past a cut moves the cut.
void reorder_edits(const std::vector<Term>& ob, const std::vector<Term>& nb, std::vector<EditOp>& out) {
  std::size_t n = ob.size();
  auto weight = [](const Term& g) { return g.is_atom("!") ? 1 : 2; };
  std::vector<std::vector<int>> w(n + 1, std::vector<int>(n + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = n; j-- > 0;) {
      w[i][j] = std::max(w[i + 1][j], w[i][j + 1]);
      if (same_shape_by_name(ob[i], nb[j])) w[i][j] = std::max(w[i][j], w[i + 1][j + 1] + weight(ob[i]));
    }
  std::vector<bool> kept_old(n, false), kept_new(n, false);
  for (std::size_t i = 0, j = 0; i < n && j < n;) {
    if (same_shape_by_name(ob[i], nb[j]) && w[i][j] == w[i + 1][j + 1] + weight(ob[i])) {
      kept_old[i++] = kept_new[j++] = true;
    } else if (w[i][j] == w[i + 1][j]) {
      ++i;
    } else {
      ++j;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (kept_old[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (kept_new[j] || !same_shape_by_name(ob[i], nb[j])) continue;
      kept_new[j] = true;
      out.push_back(make_op(EditKind::Move, goal_pos(i), goal_pos(j), ob[i], nb[j]));
      break;
    }
  }
}

}  // namespace

std::vector<EditOp> diff_clauses(const Clause& old_clause, const Clause& new_clause) {
  std::vector<EditOp> out;
  Pos head{Pos::Part::Head, 0, {}};
  term_edits(old_clause.head, new_clause.head, head, head, out);

  const auto& ob = old_clause.body;
  const auto& nb = new_clause.body;
  if (is_reordering(ob, nb)) {
    reorder_edits(ob, nb, out);
    return out;
  }
  auto steps = align(ob.size(), nb.size(), [&](std::size_t i, std::size_t j) { return goal_cost(ob[i], nb[j]); });
  std::vector<EditOp> dels, inss;
  for (const Step& s : steps) {
    if (s.kind == Step::Match) term_edits(ob[s.i], nb[s.j], goal_pos(s.i), goal_pos(s.j), out);
    else if (s.kind == Step::Del) dels.push_back(make_op(EditKind::Delete, goal_pos(s.i), std::nullopt, ob[s.i], std::nullopt));
    else inss.push_back(make_op(EditKind::Insert, std::nullopt, goal_pos(s.j), std::nullopt, nb[s.j]));
  }
  // A goal deleted in one place and inserted unchanged elsewhere moved.
  std::vector<bool> used(inss.size(), false);
  for (auto& d : dels) {
    bool moved = false;
    for (std::size_t k = 0; k < inss.size() && !moved; ++k) {
      if (used[k] || !same_shape_by_name(*d.before, *inss[k].after)) continue;
      used[k] = true;
      moved = true;
      out.push_back(make_op(EditKind::Move, d.old_pos, inss[k].new_pos, d.before, inss[k].after));
    }
    if (!moved) out.push_back(std::move(d));
  }
  for (std::size_t k = 0; k < inss.size(); ++k)
    if (!used[k]) out.push_back(std::move(inss[k]));
  return out;
}

namespace {

std::vector<ClauseEdit> match_clauses(const std::vector<const Clause*>& old_cs, const std::vector<const Clause*>& new_cs) {
  std::size_t n = old_cs.size(), m = new_cs.size(), k = n + m;
  constexpr std::int64_t scale = 1000;
  std::vector<std::vector<std::int64_t>> cost(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i < n && j < m) {
        std::int64_t ted = static_cast<std::int64_t>(tree_edit_distance(old_cs[i]->as_term(), new_cs[j]->as_term()));
        cost[i][j] = ted * scale + 1 + std::abs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
        if (ted == 0) cost[i][j] = std::abs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
      } else if (i < n) {
        cost[i][j] = j - m == i ? static_cast<std::int64_t>(old_cs[i]->as_term().size()) * scale : scale * scale * 10;
      } else if (j < m) {
        cost[i][j] = i - n == j ? static_cast<std::int64_t>(new_cs[j]->as_term().size()) * scale : scale * scale * 10;
      }
    }
  }
  std::vector<std::size_t> assign = min_cost_assignment(cost);

  std::vector<ClauseEdit> edits;
  std::vector<std::optional<std::size_t>> old_for_new(m);
  for (std::size_t i = 0; i < n; ++i)
    if (assign[i] < m) old_for_new[assign[i]] = i;
  for (std::size_t j = 0; j < m; ++j) {
    ClauseEdit e;
    e.new_clause = *new_cs[j];
    e.new_index = j;
    if (!old_for_new[j]) {
      e.kind = ClauseEditKind::ClauseAdded;
      edits.push_back(std::move(e));
      continue;
    }
    std::size_t i = *old_for_new[j];
    e.script = diff_clauses(*old_cs[i], *new_cs[j]);
    if (e.script.empty()) continue;
    e.kind = ClauseEditKind::ClauseModified;
    e.old_clause = *old_cs[i];
    e.old_index = i;
    edits.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (assign[i] < m) continue;
    ClauseEdit e;
    e.kind = ClauseEditKind::ClauseRemoved;
    e.old_clause = *old_cs[i];
    e.old_index = i;
    edits.push_back(std::move(e));
  }
  return edits;
}

}  // namespace

std::vector<PredicateDiff> diff_programs(const Program& old_program, const Program& new_program) {
  std::vector<PredicateIndicator> old_preds = old_program.predicates();
  std::vector<PredicateIndicator> new_preds = new_program.predicates();

  std::vector<PredicateIndicator> removed;
  for (const auto& p : old_preds)
    if (!new_program.defines(p)) removed.push_back(p);
  std::map<PredicateIndicator, PredicateIndicator> renamed;  // new -> old
  std::vector<bool> taken(removed.size(), false);
  for (const auto& p : new_preds) {
    if (old_program.defines(p)) continue;
    std::optional<std::size_t> best;
    std::size_t best_d = 3;
    for (std::size_t r = 0; r < removed.size(); ++r) {
      if (taken[r] || removed[r].arity != p.arity) continue;
      std::size_t d = levenshtein(removed[r].name, p.name);
      if (d < best_d) best_d = d, best = r;
    }
    if (best) {
      taken[*best] = true;
      renamed[p] = removed[*best];
    }
  }

  std::vector<PredicateDiff> out;
  for (const auto& p : new_preds) {
    PredicateDiff d;
    d.predicate = p;
    auto r = renamed.find(p);
    if (old_program.defines(p) || r != renamed.end()) {
      PredicateIndicator from = r != renamed.end() ? r->second : p;
      if (r != renamed.end()) d.renamed_from = from;
      d.kind = DiffKind::Modified;
      d.edits = match_clauses(old_program.clauses_of(from), new_program.clauses_of(p));
      if (d.edits.empty()) continue;
    } else {
      d.kind = DiffKind::Added;
      auto cs = new_program.clauses_of(p);
      for (std::size_t j = 0; j < cs.size(); ++j) {
        ClauseEdit e;
        e.kind = ClauseEditKind::ClauseAdded;
        e.new_clause = *cs[j];
        e.new_index = j;
        d.edits.push_back(std::move(e));
      }
    }
    out.push_back(std::move(d));
  }
  for (std::size_t r = 0; r < removed.size(); ++r) {
    if (taken[r]) continue;
    PredicateDiff d;
    d.predicate = removed[r];
    d.kind = DiffKind::Removed;
    auto cs = old_program.clauses_of(removed[r]);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      ClauseEdit e;
      e.kind = ClauseEditKind::ClauseRemoved;
      e.old_clause = *cs[i];
      e.old_index = i;
      d.edits.push_back(std::move(e));
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<PredicateDiff> diff_sources(std::string_view old_source, std::string_view new_source) {
  ParseResult a = parse_program(old_source);
  if (!a.ok()) throw DiffError("old program has syntax errors", a.errors);
  ParseResult b = parse_program(new_source);
  if (!b.ok()) throw DiffError("new program has syntax errors", b.errors);
  return diff_programs(a.program, b.program);
}

}  // namespace prologian
