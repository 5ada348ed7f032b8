#pragma once

#include <map>
#include <set>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian {

enum class NodeKind : std::uint8_t { User, Builtin, Library, Undefined };

struct CallEdge {
  PredicateIndicator caller;
  PredicateIndicator callee;
  SourceSpan site;
  /// Routed through call/N, maplist, foldl, include or exclude.
  bool meta = false;
};

struct CallGraph {
  std::map<PredicateIndicator, NodeKind> nodes;
  std::vector<CallEdge> edges;

  bool is_user(const PredicateIndicator& pi) const;
  std::vector<const CallEdge*> edges_from(const PredicateIndicator& pi) const;
  std::set<PredicateIndicator> successors(const PredicateIndicator& pi) const;
  /// Every node reachable from `pi` by one or more edges.
  std::set<PredicateIndicator> reachable_from(const PredicateIndicator& pi) const;
};

/// One edge per call site in clause bodies, walking control constructs and
/// meta-call arguments.
CallGraph build_call_graph(const Program& program);

}  // namespace prologian
