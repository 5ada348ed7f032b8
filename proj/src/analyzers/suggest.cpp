#include "prologian/analyzers/suggest.hpp"

#include <algorithm>
#include <numeric>

#include "prologian/engine/engine.hpp"

namespace prologian {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Suggestion suggest_predicates(const PredicateIndicator& unknown, const std::set<PredicateIndicator>& defined) {
  Suggestion s;
  s.unknown = unknown;
  const std::size_t threshold = std::max<std::size_t>(2, (unknown.name.size() + 1) / 2);
  for (const auto& pi : defined) {
    if (pi == unknown || pi.name.empty() || pi.name.front() == '$') continue;
    std::size_t d = levenshtein(unknown.name, pi.name);
    if (d > threshold) continue;
    if (pi.arity != unknown.arity && d > 1) continue;
    s.candidates.push_back({pi, d});
  }
  std::sort(s.candidates.begin(), s.candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    return x.predicate < y.predicate;
  });
  if (s.candidates.size() > kMaxSuggestions) s.candidates.resize(kMaxSuggestions);
  return s;
}

std::set<PredicateIndicator> suggestion_pool(const Program& program) {
  std::set<PredicateIndicator> pool;
  for (const auto& pi : program.predicates()) pool.insert(pi);
  for (const auto& pi : library_predicates()) pool.insert(pi);
  for (const auto& pi : builtin_predicates())
    if (pi.name.front() != '$' && pi.name != "," && pi.name != ";" && pi.name != "->") pool.insert(pi);
  return pool;
}

}  // namespace prologian
