#pragma once

#include <set>
#include <string_view>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian {

std::size_t levenshtein(std::string_view a, std::string_view b);

struct Candidate {
  PredicateIndicator predicate;
  std::size_t distance = 0;
};

struct Suggestion {
  PredicateIndicator unknown;
  std::vector<Candidate> candidates;
};

constexpr std::size_t kMaxSuggestions = 3;

/// Candidates within max(2, ceil(len/2)) edits that share the arity or are
/// within one edit; sorted by (distance, name, arity); at most three.
Suggestion suggest_predicates(const PredicateIndicator& unknown, const std::set<PredicateIndicator>& defined);

/// User predicates plus the public built-ins and library predicates.
std::set<PredicateIndicator> suggestion_pool(const Program& program);

}  // namespace prologian
