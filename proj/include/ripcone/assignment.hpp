#pragma once

#include <vector>

#include "ripcone/core.hpp"

namespace ripcone {

/// Square linear assignment, O(n^3) (shortest augmenting path form of the
/// Hungarian method). Returns perm with row i assigned to column perm[i],
/// minimizing sum_i cost(i, perm[i]).
std::vector<Index> min_cost_assignment(const Matrix& cost);

/// Same, maximizing sum_i weight(i, perm[i]).
std::vector<Index> max_weight_assignment(const Matrix& weight);

}  // namespace ripcone
