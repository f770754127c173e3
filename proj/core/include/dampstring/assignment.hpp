#pragma once

#include <vector>

#include "dampstring/types.hpp"

namespace dampstring {

// Minimum-cost perfect assignment for a square cost matrix (Hungarian method,
// O(n^3)). Returns col[i], the column assigned to row i.
std::vector<int> min_cost_assignment(const RMat& cost);

// Largest pairwise distance under the optimal assignment with cost |a - b|.
// Infinite when the sizes differ.
double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

} // namespace dampstring
