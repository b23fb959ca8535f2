#include "eitfuse/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace eitfuse {

namespace {

// Shortest augmenting path Hungarian method with potentials. cost is
// rows x cols with rows <= cols; returns the column of each row.
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const std::size_t m = n == 0 ? 0 : cost[0].size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
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
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col_of_row(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    }
    return col_of_row;
}

} // namespace

Assignment match_contacts(std::span<const Point> estimates, std::span<const Point> truth) {
    Assignment a;
    const bool by_truth = truth.size() <= estimates.size();
    const auto rows = by_truth ? truth : estimates;
    const auto cols = by_truth ? estimates : truth;
    std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            cost[i][j] = distance(rows[i], cols[j]);

    std::vector<char> est_used(estimates.size(), 0), truth_used(truth.size(), 0);
    if (!rows.empty() && !cols.empty()) {
        const auto col_of_row = hungarian(cost);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::size_t e = by_truth ? col_of_row[i] : i;
            const std::size_t t = by_truth ? i : col_of_row[i];
            a.pairs.emplace_back(e, t);
            est_used[e] = 1;
            truth_used[t] = 1;
        }
    }
    std::sort(a.pairs.begin(), a.pairs.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
    // Sum in truth order so the total does not depend on how rows were chosen.
    for (const auto& [e, t] : a.pairs) a.total_distance += distance(estimates[e], truth[t]);
    for (std::size_t t = 0; t < truth.size(); ++t)
        if (!truth_used[t]) a.missed.push_back(t);
    for (std::size_t e = 0; e < estimates.size(); ++e)
        if (!est_used[e]) a.spurious.push_back(e);
    return a;
}

double brute_force_matching_cost(std::span<const Point> estimates, std::span<const Point> truth) {
    const bool by_truth = truth.size() <= estimates.size();
    const auto small = by_truth ? truth : estimates;
    const auto large = by_truth ? estimates : truth;
    // Enumerate ordered selections of |small| elements from large via permutations.
    std::vector<std::size_t> perm(large.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = small.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    if (small.empty()) return best;
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < small.size(); ++i) c += distance(small[i], large[perm[i]]);
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace eitfuse
