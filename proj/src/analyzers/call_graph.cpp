#include "prologian/analyzers/call_graph.hpp"

#include "prologian/engine/engine.hpp"

namespace prologian {

bool CallGraph::is_user(const PredicateIndicator& pi) const {
  auto it = nodes.find(pi);
  return it != nodes.end() && it->second == NodeKind::User;
}

std::vector<const CallEdge*> CallGraph::edges_from(const PredicateIndicator& pi) const {
  std::vector<const CallEdge*> out;
  for (const auto& e : edges)
    if (e.caller == pi) out.push_back(&e);
  return out;
}

std::set<PredicateIndicator> CallGraph::successors(const PredicateIndicator& pi) const {
  std::set<PredicateIndicator> out;
  for (const auto& e : edges)
    if (e.caller == pi) out.insert(e.callee);
  return out;
}

std::set<PredicateIndicator> CallGraph::reachable_from(const PredicateIndicator& pi) const {
  std::map<PredicateIndicator, std::set<PredicateIndicator>> adj;
  for (const auto& e : edges) adj[e.caller].insert(e.callee);
  std::set<PredicateIndicator> seen;
  std::vector<PredicateIndicator> stack(adj[pi].begin(), adj[pi].end());
  while (!stack.empty()) {
    PredicateIndicator cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    for (const auto& n : adj[cur]) stack.push_back(n);
  }
  return seen;
}

namespace {

// Number of arguments a meta-predicate appends to its goal argument, keyed by
// the meta-predicate's indicator; the goal is always argument 1.
std::optional<std::size_t> meta_extra(const Term& t) {
  if (!t.is_compound()) return std::nullopt;
  std::size_t n = t.args.size();
  if (t.name == "call" && n >= 1) return n - 1;
  if (t.name == "maplist" && n >= 2 && n <= 7) return n - 1;
  if (t.name == "foldl" && n >= 4 && n <= 7) return n - 1;
  if ((t.name == "include" || t.name == "exclude") && n == 3) return 1;
  return std::nullopt;
}

class Builder {
 public:
  Builder(const Program& program, CallGraph& graph) : program_(program), graph_(graph) {}

  void visit(const PredicateIndicator& caller, const Term& goal) {
    if (!goal.is_callable()) return;
    if (goal.is_compound(",", 2) || goal.is_compound(";", 2) || goal.is_compound("->", 2)) {
      for (const Term& a : goal.args) visit(caller, a);
      return;
    }
    if (goal.is_compound("\\+", 1) || goal.is_compound("not", 1)) {
      add(caller, goal.indicator(), goal.span, false);
      visit(caller, goal.args[0]);
      return;
    }
    add(caller, goal.indicator(), goal.span, false);
    if (auto extra = meta_extra(goal)) {
      const Term& g = goal.args[0];
      if (g.is_callable() && !g.is_var()) {
        PredicateIndicator target{g.name, g.args.size() + *extra};
        add(caller, target, g.span, true);
      }
      return;
    }
    if (goal.is_compound("findall", 3)) visit(caller, goal.args[1]);
    if (goal.is_compound("forall", 2)) {
      visit(caller, goal.args[0]);
      visit(caller, goal.args[1]);
    }
  }

 private:
  void add(const PredicateIndicator& caller, const PredicateIndicator& callee, const SourceSpan& site, bool meta) {
    graph_.edges.push_back({caller, callee, site, meta});
    if (!graph_.nodes.count(callee)) graph_.nodes[callee] = kind_of(callee);
  }

  NodeKind kind_of(const PredicateIndicator& pi) const {
    if (program_.defines(pi)) return NodeKind::User;
    if (is_builtin(pi)) return NodeKind::Builtin;
    if (is_library_predicate(pi)) return NodeKind::Library;
    return NodeKind::Undefined;
  }

  const Program& program_;
  CallGraph& graph_;
};

}  // namespace

CallGraph build_call_graph(const Program& program) {
  CallGraph graph;
  for (const auto& pi : program.predicates()) graph.nodes[pi] = NodeKind::User;
  Builder builder(program, graph);
  for (const Clause& c : program.clauses())
    for (const Term& goal : c.body) builder.visit(c.indicator(), goal);
  return graph;
}

}  // namespace prologian
