#pragma once

#include <utility>
#include <vector>

namespace mvtrack {

struct MatchResult {
    std::vector<std::pair<int, int>> matches;  // (row, col) pairs, feasible only
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
    double total_cost = 0.0;
};

// Minimum-cost matching on a rectangular cost matrix. Entries that are NaN,
// infinite, or strictly greater than `gate` are infeasible. Among all
// matchings of maximum feasible cardinality the returned one has minimum
// total cost (Hungarian algorithm with potentials on a padded square
// matrix). Deterministic for equal-cost optima.
MatchResult solve_assignment(const std::vector<std::vector<double>>& cost,
                             double gate);

MatchResult solve_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace mvtrack
