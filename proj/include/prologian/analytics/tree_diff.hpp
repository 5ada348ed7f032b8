#pragma once

#include <cstdint>
#include <vector>

#include "prologian/syntax/term.hpp"

namespace prologian {

/// Ordered tree edit distance (Zhang-Shasha) with unit insert, delete and
/// relabel costs. Variables compare by name, compounds by functor name; arity
/// is carried by the tree shape.
std::size_t tree_edit_distance(const Term& a, const Term& b);

/// Minimum-cost perfect matching on a square matrix (Hungarian method).
/// Returns the column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost);

}  // namespace prologian
