#include "prologian/analytics/bug_classifier.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "prologian/engine/engine.hpp"
#include "prologian/syntax/parser.hpp"

namespace prologian {

std::string_view to_string(BugType t) {
  switch (t) {
    case BugType::Incomplete: return "Incomplete";
    case BugType::WrongArgument: return "WrongArgument";
    case BugType::RuleGoalProblems: return "RuleGoalProblems";
    case BugType::OperatorError: return "OperatorError";
    case BugType::WrongPredicateName: return "WrongPredicateName";
    case BugType::DomainLogicProblem: return "DomainLogicProblem";
    case BugType::CutProblem: return "CutProblem";
    case BugType::WrongVariableConstant: return "WrongVariableConstant";
    case BugType::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(BugSubtype s) {
  switch (s) {
    case BugSubtype::MissingPredicate: return "MissingPredicate";
    case BugSubtype::MissingClause: return "MissingClause";
    case BugSubtype::ArgumentOrderSwap: return "ArgumentOrderSwap";
    case BugSubtype::MissingArgument: return "MissingArgument";
    case BugSubtype::ExtraArgument: return "ExtraArgument";
    case BugSubtype::ExtraGoal: return "ExtraGoal";
    case BugSubtype::MissingGoal: return "MissingGoal";
    case BugSubtype::GoalOrderSwap: return "GoalOrderSwap";
    case BugSubtype::WrongOperator: return "WrongOperator";
    case BugSubtype::ListTerminatorsIssue: return "ListTerminatorsIssue";
    case BugSubtype::MissingNegation: return "MissingNegation";
    case BugSubtype::MissingCut: return "MissingCut";
    case BugSubtype::ExtraCut: return "ExtraCut";
    case BugSubtype::WrongPlacement: return "WrongPlacement";
    case BugSubtype::WrongVariableName: return "WrongVariableName";
    case BugSubtype::WrongConstant: return "WrongConstant";
    case BugSubtype::OtherSubtype: return "Other";
  }
  return "?";
}

bool subtype_allowed(BugType t, BugSubtype s) {
  using S = BugSubtype;
  switch (t) {
    case BugType::Incomplete: return s == S::MissingPredicate || s == S::MissingClause;
    case BugType::WrongArgument:
      return s == S::ArgumentOrderSwap || s == S::MissingArgument || s == S::ExtraArgument || s == S::OtherSubtype;
    case BugType::RuleGoalProblems: return s == S::ExtraGoal || s == S::MissingGoal || s == S::GoalOrderSwap;
    case BugType::OperatorError:
      return s == S::WrongOperator || s == S::ListTerminatorsIssue || s == S::MissingNegation;
    case BugType::CutProblem: return s == S::MissingCut || s == S::ExtraCut || s == S::WrongPlacement;
    case BugType::WrongVariableConstant: return s == S::WrongVariableName || s == S::WrongConstant;
    case BugType::WrongPredicateName:
    case BugType::DomainLogicProblem:
    case BugType::Other: return false;
  }
  return false;
}

std::string BugLabel::str() const {
  std::string out(to_string(type));
  if (subtype) out += "/" + std::string(to_string(*subtype));
  return out;
}

std::set<BugType> bug_types(const std::vector<BugLabel>& labels) {
  std::set<BugType> out;
  for (const auto& l : labels) out.insert(l.type);
  return out;
}

namespace {

using Pos = TermPosition;
using T = BugType;
using S = BugSubtype;

class Labeler {
 public:
  explicit Labeler(PredicateIndicator pred) : pred_(std::move(pred)) {}

  void add(BugType type, std::optional<BugSubtype> sub, const Term* evidence) {
    BugLabel l;
    l.type = type;
    l.subtype = sub;
    l.predicate = pred_;
    if (evidence) l.evidence = evidence->span;
    out_.push_back(std::move(l));
  }
  void add(BugType type, std::optional<BugSubtype> sub, const std::optional<SourceSpan>& span) {
    BugLabel l;
    l.type = type;
    l.subtype = sub;
    l.predicate = pred_;
    l.evidence = span;
    out_.push_back(std::move(l));
  }

  std::vector<BugLabel> take() { return std::move(out_); }

 private:
  PredicateIndicator pred_;
  std::vector<BugLabel> out_;
};

bool is_cut(const Term& t) { return t.is_atom("!"); }

bool is_list_cell(const Term& t) { return t.is_cons() || t.is_nil(); }

// `[X|Xs]` against `[X,Xs]` and similar: one side is a list cell, the other
// a variable or a differently terminated list.
bool list_shape_change(const Term& a, const Term& b) {
  if (a.is_cons() && b.is_cons()) return false;
  return (a.is_cons() && (b.is_var() || b.is_nil())) || (b.is_cons() && (a.is_var() || a.is_nil()));
}

std::size_t occurrences(const Term& t, const std::string& var_name) {
  if (t.is_var()) return t.name == var_name;
  std::size_t n = 0;
  for (const Term& a : t.args) n += occurrences(a, var_name);
  return n;
}

bool args_equal(const Term& a, const Term& b) {
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!same_shape_by_name(a.args[k], b.args[k])) return false;
  return true;
}

bool is_permutation_of(const Term& a, const Term& b) {
  if (a.args.size() != b.args.size() || a.args.size() < 2 || args_equal(a, b)) return false;
  std::vector<bool> used(b.args.size(), false);
  for (const Term& x : a.args) {
    bool found = false;
    for (std::size_t k = 0; k < b.args.size() && !found; ++k) {
      if (!used[k] && same_shape_by_name(x, b.args[k])) used[k] = true, found = true;
    }
    if (!found) return false;
  }
  return true;
}

// Goal-level unit: the top term at a head or body position on both sides.
struct Unit {
  const Term* old_top = nullptr;
  const Term* new_top = nullptr;
  bool in_call = false;
  std::vector<const EditOp*> edits;
};

void classify_atomic(const EditOp& e, const Unit& u, const Clause& old_clause, Labeler& out) {
  std::optional<SourceSpan> span = e.after ? std::optional(e.after->span) : e.before ? std::optional(e.before->span) : std::nullopt;
  switch (e.kind) {
    case EditKind::Relabel:
      if (is_operator(e.before->name) && is_operator(e.after->name)) out.add(T::OperatorError, S::WrongOperator, span);
      else if (is_list_cell(*e.before) != is_list_cell(*e.after)) out.add(T::OperatorError, S::ListTerminatorsIssue, span);
      else out.add(T::WrongArgument, S::OtherSubtype, span);
      return;
    case EditKind::Replace: {
      const Term& a = *e.before;
      const Term& b = *e.after;
      if (list_shape_change(a, b)) {
        out.add(T::OperatorError, S::ListTerminatorsIssue, span);
      } else if (a.is_var() && b.is_var()) {
        if (u.in_call && occurrences(old_clause.as_term(), a.name) > 1) out.add(T::WrongArgument, S::OtherSubtype, span);
        else out.add(T::WrongVariableConstant, S::WrongVariableName, span);
      } else if (a.is_atomic() && b.is_atomic()) {
        out.add(T::WrongVariableConstant, S::WrongConstant, span);
      } else {
        out.add(T::WrongArgument, S::OtherSubtype, span);
      }
      return;
    }
    case EditKind::Insert:
    case EditKind::Delete:
    case EditKind::Move: out.add(T::WrongArgument, S::OtherSubtype, span); return;
  }
}

void classify_unit(const Unit& u, const Clause& old_clause, bool head, Labeler& out) {
  const Term& og = *u.old_top;
  const Term& ng = *u.new_top;
  std::optional<SourceSpan> span = ng.span;
  bool skip_args = false;
  if (og.is_callable() && ng.is_callable() && og.name != ng.name && og.args.size() == ng.args.size()) {
    // The operator check precedes the name check: `=` -> `is` keeps its
    // arguments yet is an operator fix, not a misnamed call.
    if (is_operator(og.name) && is_operator(ng.name)) out.add(T::OperatorError, S::WrongOperator, span);
    else if (!head && args_equal(og, ng)) out.add(T::WrongPredicateName, std::nullopt, span);
  } else if (og.is_callable() && ng.is_callable() && og.name == ng.name) {
    if (is_permutation_of(og, ng)) {
      out.add(T::WrongArgument, S::ArgumentOrderSwap, span);
      skip_args = true;
    } else if (og.args.size() != ng.args.size()) {
      out.add(T::WrongArgument, ng.args.size() > og.args.size() ? S::MissingArgument : S::ExtraArgument, span);
      skip_args = true;
    }
  }
  if (skip_args) return;
  for (const EditOp* e : u.edits) {
    bool top = (e->new_pos && e->new_pos->args.empty()) || (e->old_pos && e->old_pos->args.empty());
    if (top && e->kind == EditKind::Relabel) continue;
    classify_atomic(*e, u, old_clause, out);
  }
}

void classify_goal_edits(const std::vector<const EditOp*>& goal_ops, Labeler& out) {
  std::vector<const EditOp*> dels, inss;
  for (const EditOp* e : goal_ops) {
    if (e->kind == EditKind::Delete) dels.push_back(e);
    else if (e->kind == EditKind::Insert) inss.push_back(e);
    else if (e->kind == EditKind::Move) {
      if (is_cut(*e->after)) out.add(T::CutProblem, S::WrongPlacement, &*e->after);
      else out.add(T::RuleGoalProblems, S::GoalOrderSwap, &*e->after);
    }
  }
  std::vector<bool> del_used(dels.size(), false);
  for (const EditOp* ins : inss) {
    const Term& g = *ins->after;
    if (g.is_compound("\\+", 1) || g.is_compound("not", 1)) {
      for (std::size_t k = 0; k < dels.size(); ++k)
        if (!del_used[k] && same_shape_by_name(*dels[k]->before, g.args[0])) del_used[k] = true;
      out.add(T::OperatorError, S::MissingNegation, &g);
    } else if (is_cut(g)) {
      out.add(T::CutProblem, S::MissingCut, &g);
    } else {
      out.add(T::RuleGoalProblems, S::MissingGoal, &g);
    }
  }
  for (std::size_t k = 0; k < dels.size(); ++k) {
    if (del_used[k]) continue;
    const Term& g = *dels[k]->before;
    if (is_cut(g)) out.add(T::CutProblem, S::ExtraCut, &g);
    else out.add(T::RuleGoalProblems, S::ExtraGoal, &g);
  }
}

bool is_call(const Term& goal) {
  return goal.is_callable() && !is_operator(goal.name) && !is_builtin(goal.indicator());
}

void classify_modified(const ClauseEdit& ce, Labeler& out) {
  const Clause& oc = *ce.old_clause;
  const Clause& nc = *ce.new_clause;
  std::vector<const EditOp*> goal_ops;
  // Keyed by (part, old goal, new goal).
  std::map<std::tuple<int, std::size_t, std::size_t>, Unit> units;
  for (const EditOp& e : ce.script) {
    bool goal_level = (e.kind == EditKind::Insert && e.new_pos->is_goal()) ||
                      (e.kind == EditKind::Delete && e.old_pos->is_goal()) || e.kind == EditKind::Move;
    if (goal_level) {
      goal_ops.push_back(&e);
      continue;
    }
    // Argument-level insertions and deletions carry one position; their
    // goal index on the other side comes from a sibling edit or the alignment.
    const Pos& any = e.new_pos ? *e.new_pos : *e.old_pos;
    std::size_t og = e.old_pos ? e.old_pos->goal : any.goal;
    std::size_t ng = e.new_pos ? e.new_pos->goal : any.goal;
    bool head = any.part == Pos::Part::Head;
    auto key = std::make_tuple(head ? 0 : 1, og, ng);
    if (!e.old_pos || !e.new_pos) {
      for (auto& [k, u] : units) {
        if (std::get<0>(k) != std::get<0>(key)) continue;
        if ((e.old_pos && std::get<1>(k) == og) || (e.new_pos && std::get<2>(k) == ng)) key = k;
      }
    }
    Unit& u = units[key];
    if (!u.old_top) {
      Pos op{any.part, std::get<1>(key), {}};
      Pos np{any.part, std::get<2>(key), {}};
      u.old_top = term_at(oc, op);
      u.new_top = term_at(nc, np);
      if (!u.old_top || !u.new_top) {
        u.old_top = u.new_top = nullptr;
        out.add(T::Other, std::nullopt, nc.span);
        continue;
      }
      u.in_call = !head && is_call(*u.new_top);
    }
    u.edits.push_back(&e);
  }
  classify_goal_edits(goal_ops, out);
  for (auto& [k, u] : units)
    if (u.old_top) classify_unit(u, oc, std::get<0>(k) == 0, out);
}

bool head_changed(const ClauseEdit& ce) {
  for (const EditOp& e : ce.script)
    if ((e.old_pos && e.old_pos->part == Pos::Part::Head) || (e.new_pos && e.new_pos->part == Pos::Part::Head))
      return true;
  return false;
}

}  // namespace

std::vector<BugLabel> classify_bug(const std::vector<PredicateDiff>& diff, const Program& /*old_program*/,
                                   const Program& /*new_program*/) {
  if (diff.empty()) throw std::invalid_argument("nothing to classify: the programs are identical");
  std::vector<BugLabel> all;
  for (const PredicateDiff& pd : diff) {
    Labeler out(pd.predicate);
    switch (pd.kind) {
      case DiffKind::Added: {
        std::optional<SourceSpan> span;
        if (!pd.edits.empty() && pd.edits.front().new_clause) span = pd.edits.front().new_clause->span;
        out.add(T::Incomplete, S::MissingPredicate, span);
        break;
      }
      case DiffKind::Removed: {
        std::optional<SourceSpan> span;
        if (!pd.edits.empty() && pd.edits.front().old_clause) span = pd.edits.front().old_clause->span;
        out.add(T::Other, std::nullopt, span);
        break;
      }
      case DiffKind::Modified: {
        if (pd.renamed_from) {
          std::optional<SourceSpan> span;
          for (const auto& ce : pd.edits)
            if (ce.new_clause) span = span ? span : std::optional(ce.new_clause->head.span);
          out.add(T::WrongPredicateName, std::nullopt, span);
        }
        std::vector<const ClauseEdit*> rewrites;
        for (const ClauseEdit& ce : pd.edits) {
          switch (ce.kind) {
            case ClauseEditKind::ClauseAdded: out.add(T::Incomplete, S::MissingClause, ce.new_clause->span); break;
            case ClauseEditKind::ClauseRemoved: out.add(T::Other, std::nullopt, ce.old_clause->span); break;
            case ClauseEditKind::ClauseModified:
              if (ce.script.size() > kRewriteThreshold) rewrites.push_back(&ce);
              else classify_modified(ce, out);
              break;
          }
        }
        bool domain = rewrites.size() >= 2 &&
                      std::none_of(rewrites.begin(), rewrites.end(), [](const ClauseEdit* c) { return head_changed(*c); });
        for (const ClauseEdit* ce : rewrites)
          out.add(domain ? T::DomainLogicProblem : T::Other, std::nullopt, ce->new_clause->span);
        break;
      }
    }
    for (auto& l : out.take()) all.push_back(std::move(l));
  }
  auto key = [](const BugLabel& l) {
    return std::make_tuple(l.type, l.subtype.has_value(), l.subtype.value_or(S::OtherSubtype), l.predicate);
  };
  std::stable_sort(all.begin(), all.end(), [&](const BugLabel& a, const BugLabel& b) { return key(a) < key(b); });
  all.erase(std::unique(all.begin(), all.end(), [&](const BugLabel& a, const BugLabel& b) { return key(a) == key(b); }),
            all.end());
  return all;
}

}  // namespace prologian
