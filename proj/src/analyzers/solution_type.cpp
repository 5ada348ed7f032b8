#include "prologian/analyzers/solution_type.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace prologian {

std::string_view to_string(Technique t) {
  switch (t) {
    case Technique::Recursive: return "Recursive";
    case Technique::NonRecursive: return "NonRecursive";
    case Technique::HigherOrder: return "HigherOrder";
  }
  return "?";
}

std::optional<Technique> parse_technique(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != '_' && c != '-' && c != ' ') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "recursive" || s == "recursion") return Technique::Recursive;
  if (s == "nonrecursive") return Technique::NonRecursive;
  if (s == "higherorder") return Technique::HigherOrder;
  return std::nullopt;
}

SolutionTypeVerdict classify_solution_type(const CallGraph& graph, const PredicateIndicator& pred) {
  if (!graph.is_user(pred)) throw std::invalid_argument("not a user-defined predicate: " + pred.str());
  SolutionTypeVerdict v;
  v.predicate = pred;
  for (const CallEdge* e : graph.edges_from(pred)) {
    if (e->meta) v.higher_order_evidence.push_back(e->site);
    if (e->callee == pred || graph.reachable_from(e->callee).count(pred)) v.recursion_evidence.push_back(e->site);
  }
  if (!v.recursion_evidence.empty()) v.verdict = Technique::Recursive;
  else if (!v.higher_order_evidence.empty()) v.verdict = Technique::HigherOrder;
  else v.verdict = Technique::NonRecursive;
  return v;
}

namespace {

std::string at(const SourceSpan& s) { return std::to_string(s.start_line) + ":" + std::to_string(s.start_col); }

std::string list_sites(const std::vector<SourceSpan>& spans) {
  std::string out;
  for (const auto& s : spans) out += (out.empty() ? "" : ", ") + at(s);
  return out;
}

}  // namespace

std::vector<TechniqueViolation> check_required_technique(const std::vector<SolutionTypeVerdict>& verdicts,
                                                         const std::vector<TechniqueRequirement>& required) {
  std::vector<TechniqueViolation> out;
  for (const auto& req : required) {
    auto it = std::find_if(verdicts.begin(), verdicts.end(),
                           [&](const SolutionTypeVerdict& v) { return v.predicate == req.predicate; });
    const std::string name = req.predicate.str();
    if (it == verdicts.end()) {
      out.push_back({req.predicate, req.required, name + " is required to be " + std::string(to_string(req.required)) +
                                                      " but is not defined"});
      continue;
    }
    switch (req.required) {
      case Technique::Recursive:
        if (!it->recursive()) {
          std::string msg = name + " must be recursive, but no recursive call was found";
          if (it->higher_order()) msg += " (higher-order calls at " + list_sites(it->higher_order_evidence) + ")";
          out.push_back({req.predicate, req.required, msg});
        }
        break;
      case Technique::HigherOrder:
        if (!it->higher_order()) {
          std::string msg = name + " must use a higher-order predicate (call/N, maplist, foldl), but none was found";
          if (it->recursive()) msg += " (recursive calls at " + list_sites(it->recursion_evidence) + ")";
          out.push_back({req.predicate, req.required, msg});
        }
        break;
      case Technique::NonRecursive:
        if (it->recursive())
          out.push_back({req.predicate, req.required,
                         name + " must not be recursive, but recursive calls were found at " +
                             list_sites(it->recursion_evidence)});
        break;
    }
  }
  return out;
}

}  // namespace prologian
