#pragma once

// Independent reference implementations for oracle-style tests. These must
// stay brute-force and must not share code with the library paths they
// check.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "wavecast/learn.hpp"

namespace oracle {

/// DTW by explicit enumeration of every monotone warping path from (0,0)
/// to (n-1,m-1). Exponential; only for short series.
inline double dtw_brute_force(std::span<const double> p, std::span<const double> q) {
    struct Walker {
        std::span<const double> p, q;
        double best = std::numeric_limits<double>::infinity();
        void walk(std::size_t i, std::size_t j, double cost) {
            cost += std::abs(p[i] - q[j]);
            if (i == p.size() - 1 && j == q.size() - 1) {
                if (cost < best)
                    best = cost;
                return;
            }
            if (i + 1 < p.size())
                walk(i + 1, j, cost);
            if (j + 1 < q.size())
                walk(i, j + 1, cost);
            if (i + 1 < p.size() && j + 1 < q.size())
                walk(i + 1, j + 1, cost);
        }
    };
    Walker w{p, q, std::numeric_limits<double>::infinity()};
    w.walk(0, 0, 0.0);
    return w.best;
}

/// Plain median, independent of the Fenwick-based split machinery.
inline double direct_median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

/// Groups training rows by the leaf they are routed to.
inline std::vector<std::vector<std::size_t>> rows_per_leaf(const wavecast::RegressionTree& tree,
                                                           const wavecast::Matrix& x) {
    std::vector<std::vector<std::size_t>> groups(tree.nodes.size());
    for (std::size_t r = 0; r < x.n_rows; ++r)
        groups[static_cast<std::size_t>(tree.leaf_index(x.row(r)))].push_back(r);
    return groups;
}

inline int tree_depth(const wavecast::RegressionTree& tree, int node = 0) {
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf())
        return 0;
    return 1 + std::max(tree_depth(tree, n.left), tree_depth(tree, n.right));
}

} // namespace oracle
