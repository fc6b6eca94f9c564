#include "mvtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvtrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hungarian algorithm with potentials on a square matrix; returns col -> row.
std::vector<int> hungarian_square(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col_to_row(n, -1);
    for (int j = 1; j <= n; ++j) col_to_row[j - 1] = p[j] - 1;
    return col_to_row;
}

}  // namespace

MatchResult solve_assignment(const std::vector<std::vector<double>>& cost, double gate) {
    const int rows = static_cast<int>(cost.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(cost[0].size());
    MatchResult result;
    if (rows == 0 || cols == 0) {
        for (int i = 0; i < rows; ++i) result.unmatched_rows.push_back(i);
        for (int j = 0; j < cols; ++j) result.unmatched_cols.push_back(j);
        return result;
    }

    auto feasible = [&](int i, int j) {
        const double c = cost[i][j];
        return std::isfinite(c) && c <= gate;
    };

    double max_abs = 0.0;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (feasible(i, j)) max_abs = std::max(max_abs, std::abs(cost[i][j]));
        }
    }
    const int n = std::max(rows, cols);
    // Every non-feasible cell (gated, infinite, or padding) costs the same
    // sentinel, so the solver first maximizes feasible matches, then cost.
    const double big = (max_abs + 1.0) * (n + 1);

    std::vector<std::vector<double>> a(n, std::vector<double>(n, big));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (feasible(i, j)) a[i][j] = cost[i][j];
        }
    }

    const std::vector<int> col_to_row = hungarian_square(a);
    std::vector<char> row_matched(rows, 0), col_matched(cols, 0);
    for (int j = 0; j < n; ++j) {
        const int i = col_to_row[j];
        if (i < 0 || i >= rows || j >= cols) continue;
        if (!feasible(i, j)) continue;
        result.matches.emplace_back(i, j);
        result.total_cost += cost[i][j];
        row_matched[i] = 1;
        col_matched[j] = 1;
    }
    std::sort(result.matches.begin(), result.matches.end());
    for (int i = 0; i < rows; ++i) {
        if (!row_matched[i]) result.unmatched_rows.push_back(i);
    }
    for (int j = 0; j < cols; ++j) {
        if (!col_matched[j]) result.unmatched_cols.push_back(j);
    }
    return result;
}

MatchResult solve_assignment(const std::vector<std::vector<double>>& cost) {
    return solve_assignment(cost, kInf);
}

}  // namespace mvtrack
