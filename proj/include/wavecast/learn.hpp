#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "wavecast/error.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/rng.hpp"

namespace wavecast {

enum class Algorithm { random_forest, gradient_boosting };

inline std::string to_string(Algorithm a) {
    return a == Algorithm::random_forest ? "random_forest" : "gradient_boosting";
}

inline Algorithm parse_algorithm(const std::string& name) {
    if (name == "rf" || name == "random_forest")
        return Algorithm::random_forest;
    if (name == "gb" || name == "xgb" || name == "xgboost" || name == "gradient_boosting")
        return Algorithm::gradient_boosting;
    throw Error("unknown algorithm '" + name + "' (expected rf|gb)");
}

enum class SplitCriterion { mae, mse };

/// Features sampled per split. Default is ceil(sqrt(n_features)); the
/// `all` mode exists mainly for the exact-fit oracle tests.
struct FeatureSubset {
    enum class Mode { sqrt_features, all, fraction, count };
    Mode mode = Mode::sqrt_features;
    double fraction = 1.0;
    int count = 0;

    std::size_t resolve(std::size_t n_features) const {
        std::size_t m = n_features;
        switch (mode) {
        case Mode::sqrt_features:
            m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features))));
            break;
        case Mode::all:
            m = n_features;
            break;
        case Mode::fraction:
            m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_features)));
            break;
        case Mode::count:
            m = static_cast<std::size_t>(count);
            break;
        }
        return std::clamp<std::size_t>(m, 1, n_features);
    }

    std::string describe() const {
        switch (mode) {
        case Mode::sqrt_features: return "sqrt";
        case Mode::all: return "all";
        case Mode::fraction: return std::to_string(fraction);
        case Mode::count: return std::to_string(count);
        }
        return "?";
    }

    static FeatureSubset all_features() { return {Mode::all, 1.0, 0}; }
};

/// One grid point. max_depth counts split levels below the root; -1 means
/// unlimited (Table-style "None").
struct HyperParams {
    Algorithm algorithm = Algorithm::random_forest;
    int n_trees = 100;
    int max_depth = -1;
    double learning_rate = 0.1; // gradient boosting only
    SplitCriterion split_criterion = SplitCriterion::mae;
    bool bootstrap = true; // random forest only
    FeatureSubset feature_subset;

    /// Compact `key=value;...` form for the reports file (comma-free).
    std::string describe() const {
        std::string s = "algorithm=" + to_string(algorithm);
        s += ";n_trees=" + std::to_string(n_trees);
        s += ";max_depth=" + (max_depth < 0 ? std::string("none") : std::to_string(max_depth));
        if (algorithm == Algorithm::gradient_boosting) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", learning_rate);
            s += ";learning_rate=" + std::string(buf);
        } else {
            s += std::string(";split_criterion=") + (split_criterion == SplitCriterion::mae ? "mae" : "mse");
            s += std::string(";bootstrap=") + (bootstrap ? "true" : "false");
        }
        s += ";feature_subset=" + feature_subset.describe();
        return s;
    }
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;

    bool is_leaf() const { return feature < 0; }
};

/// Binary regression tree, nodes in preorder, root at index 0.
struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_row(const double* row) const {
        int i = 0;
        while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = row[n.feature] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }

    /// Leaf index a row is routed to; used by structure-inspection tests.
    int leaf_index(const double* row) const {
        int i = 0;
        while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = row[n.feature] <= n.threshold ? n.left : n.right;
        }
        return i;
    }
};

/// A fitted Random Forest or gradient-boosted ensemble. Reproducible from
/// (dataset, params, seed); prediction never mutates state.
struct TreeEnsemble {
    HyperParams params;
    std::vector<RegressionTree> trees;
    double base_value = 0; // gradient boosting offset
    std::uint64_t seed = 0;
    std::size_t n_features = 0;
};

namespace detail {

// Fenwick tree over rank-compressed target values. Supports the one query
// split search needs: the minimum sum of absolute deviations of the values
// inserted so far (attained at their median).
class OrderStatAccumulator {
public:
    explicit OrderStatAccumulator(std::vector<double> sorted_unique)
        : values_(std::move(sorted_unique)),
          cnt_(values_.size() + 1, 0),
          sum_(values_.size() + 1, 0.0) {
        top_bit_ = 1;
        while (top_bit_ * 2 <= values_.size())
            top_bit_ *= 2;
    }

    void reset() {
        std::fill(cnt_.begin(), cnt_.end(), 0);
        std::fill(sum_.begin(), sum_.end(), 0.0);
        n_ = 0;
        total_ = 0;
    }

    void insert(double y) {
        auto rank = static_cast<std::size_t>(
                        std::lower_bound(values_.begin(), values_.end(), y) - values_.begin()) + 1;
        for (std::size_t i = rank; i <= values_.size(); i += i & (~i + 1)) {
            ++cnt_[i];
            sum_[i] += y;
        }
        ++n_;
        total_ += y;
    }

    /// Sum of the j smallest inserted values.
    double sum_smallest(long j) const {
        if (j <= 0)
            return 0.0;
        std::size_t pos = 0;
        long rem = j;
        double acc = 0;
        for (std::size_t step = top_bit_; step > 0; step >>= 1) {
            std::size_t next = pos + step;
            if (next <= values_.size() && cnt_[next] < rem) {
                pos = next;
                rem -= cnt_[next];
                acc += sum_[next];
            }
        }
        return acc + static_cast<double>(rem) * values_[pos];
    }

    /// min over c of sum |y_i - c| = (sum of top half) - (sum of bottom half).
    double min_abs_dev() const {
        long k = n_ / 2;
        return (total_ - sum_smallest(n_ - k)) - sum_smallest(k);
    }

    long size() const { return n_; }

private:
    std::vector<double> values_;
    std::vector<long> cnt_;
    std::vector<double> sum_;
    std::size_t top_bit_ = 1;
    long n_ = 0;
    double total_ = 0;
};

struct TreeGrowthSpec {
    SplitCriterion criterion = SplitCriterion::mae;
    int max_depth = -1;
    std::size_t subset_size = 1;
};

inline double median_of_sorted(const std::vector<double>& sorted) {
    std::size_t n = sorted.size();
    return n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

inline double abs_dev_of_sorted(const std::vector<double>& sorted) {
    std::size_t n = sorted.size();
    std::size_t k = n / 2;
    double low = 0, high = 0;
    for (std::size_t i = 0; i < k; ++i) {
        low += sorted[i];
        high += sorted[n - 1 - i];
    }
    return high - low;
}

// Greedy top-down growth. At each node a feature subset is sampled without
// replacement, candidate thresholds are midpoints between consecutive
// distinct sorted values, and the split minimizing summed child deviation
// is taken (absolute deviation about the child median under mae, squared
// deviation about the mean under mse). Ties go to the lowest feature
// index, then the lowest threshold.
class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<double>& y, TreeGrowthSpec spec, RandomSource& rng)
        : x_(x), y_(y), spec_(spec), rng_(rng) {}

    RegressionTree build(std::vector<std::size_t> rows) {
        if (rows.empty())
            throw Error("fit_tree: empty dataset");
        RegressionTree tree;
        grow(tree, rows, 0);
        return tree;
    }

private:
    int grow(RegressionTree& tree, std::vector<std::size_t>& rows, int depth) {
        std::vector<double> sorted_y;
        sorted_y.reserve(rows.size());
        for (std::size_t r : rows)
            sorted_y.push_back(y_[r]);
        std::sort(sorted_y.begin(), sorted_y.end());

        double leaf_value, node_dev;
        if (spec_.criterion == SplitCriterion::mae) {
            leaf_value = median_of_sorted(sorted_y);
            node_dev = abs_dev_of_sorted(sorted_y);
        } else {
            double mean = std::accumulate(sorted_y.begin(), sorted_y.end(), 0.0) /
                          static_cast<double>(sorted_y.size());
            leaf_value = mean;
            node_dev = 0;
            for (double v : sorted_y)
                node_dev += (v - mean) * (v - mean);
        }

        bool depth_reached = spec_.max_depth >= 0 && depth >= spec_.max_depth;
        if (rows.size() < 2 || node_dev == 0 || depth_reached)
            return make_leaf(tree, leaf_value);

        SplitChoice best = find_best_split(rows, sorted_y);
        if (best.feature < 0)
            return make_leaf(tree, leaf_value); // every sampled feature constant

        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{best.feature, best.threshold, -1, -1, 0.0});

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            (x_.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        tree.nodes[static_cast<std::size_t>(idx)].left = grow(tree, left, depth + 1);
        tree.nodes[static_cast<std::size_t>(idx)].right = grow(tree, right, depth + 1);
        return idx;
    }

    static int make_leaf(RegressionTree& tree, double value) {
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, value});
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    struct SplitChoice {
        int feature = -1;
        double threshold = 0;
        double score = std::numeric_limits<double>::infinity();
    };

    SplitChoice find_best_split(const std::vector<std::size_t>& rows,
                                const std::vector<double>& sorted_y) {
        auto features = rng_.sample_without_replacement(x_.n_cols, spec_.subset_size);
        std::sort(features.begin(), features.end());

        std::vector<double> unique_y = sorted_y;
        unique_y.erase(std::unique(unique_y.begin(), unique_y.end()), unique_y.end());
        OrderStatAccumulator acc(std::move(unique_y));

        const std::size_t n = rows.size();
        std::vector<std::pair<double, double>> pairs(n); // (feature value, target)
        std::vector<double> dev_left(n, 0.0), dev_right(n, 0.0);

        SplitChoice best;
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < n; ++i)
                pairs[i] = {x_.at(rows[i], f), y_[rows[i]]};
            std::sort(pairs.begin(), pairs.end());
            if (pairs.front().first == pairs.back().first)
                continue;

            if (spec_.criterion == SplitCriterion::mae) {
                acc.reset();
                for (std::size_t c = 1; c < n; ++c) {
                    acc.insert(pairs[c - 1].second);
                    dev_left[c] = acc.min_abs_dev();
                }
                acc.reset();
                for (std::size_t c = n - 1; c >= 1; --c) {
                    acc.insert(pairs[c].second);
                    dev_right[c] = acc.min_abs_dev();
                }
            } else {
                double s1 = 0, s2 = 0;
                for (std::size_t c = 1; c < n; ++c) {
                    s1 += pairs[c - 1].second;
                    s2 += pairs[c - 1].second * pairs[c - 1].second;
                    dev_left[c] = std::max(0.0, s2 - s1 * s1 / static_cast<double>(c));
                }
                s1 = s2 = 0;
                for (std::size_t c = n - 1; c >= 1; --c) {
                    s1 += pairs[c].second;
                    s2 += pairs[c].second * pairs[c].second;
                    dev_right[c] = std::max(0.0, s2 - s1 * s1 / static_cast<double>(n - c));
                }
            }

            for (std::size_t c = 1; c < n; ++c) {
                double a = pairs[c - 1].first, b = pairs[c].first;
                if (a == b)
                    continue;
                double score = dev_left[c] + dev_right[c];
                if (score < best.score) {
                    double th = (a + b) / 2.0;
                    if (!(th < b))
                        th = a; // midpoint rounded up; fall back so the cut stays put
                    best = {static_cast<int>(f), th, score};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const std::vector<double>& y_;
    TreeGrowthSpec spec_;
    RandomSource& rng_;
};

} // namespace detail

/// Fits one regression tree on the full dataset with the params' split
/// criterion, depth limit and per-node feature subsetting.
inline RegressionTree fit_tree(const SupervisedDataset& dataset, const HyperParams& params,
                               RandomSource& rng) {
    if (dataset.n_rows() == 0)
        throw Error("fit_tree: empty dataset");
    detail::TreeGrowthSpec spec{params.split_criterion, params.max_depth,
                                params.feature_subset.resolve(dataset.n_cols())};
    detail::TreeBuilder builder(dataset.features, dataset.targets, spec, rng);
    std::vector<std::size_t> rows(dataset.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return builder.build(std::move(rows));
}

/// n_trees trees, each on a bootstrap resample (row count preserved,
/// sampling with replacement) unless bootstrap is off, each with an rng
/// stream derived from (seed, tree index) so parallel and serial fits give
/// identical forests. Prediction is the mean over trees.
inline TreeEnsemble fit_random_forest(const SupervisedDataset& dataset, const HyperParams& params,
                                      std::uint64_t seed) {
    if (params.algorithm != Algorithm::random_forest)
        throw Error("fit_random_forest: params.algorithm mismatch");
    if (params.n_trees < 1)
        throw Error("fit_random_forest: n_trees must be >= 1");
    if (dataset.n_rows() == 0)
        throw Error("fit_random_forest: empty dataset");

    TreeEnsemble ensemble;
    ensemble.params = params;
    ensemble.seed = seed;
    ensemble.n_features = dataset.n_cols();
    detail::TreeGrowthSpec spec{params.split_criterion, params.max_depth,
                                params.feature_subset.resolve(dataset.n_cols())};
    const std::size_t n = dataset.n_rows();
    for (int t = 0; t < params.n_trees; ++t) {
        RandomSource rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows;
        rows.reserve(n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n; ++i)
                rows.push_back(rng.uniform_index(n));
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        detail::TreeBuilder builder(dataset.features, dataset.targets, spec, rng);
        ensemble.trees.push_back(builder.build(std::move(rows)));
    }
    return ensemble;
}

/// Stagewise residual fitting: base value is the target mean, every stage
/// fits a squared-error tree (mean leaves) to the current residuals and is
/// folded in scaled by the learning rate. Feature subsetting per node as
/// in fit_tree; n_trees = 0 degenerates to the mean-only model.
inline TreeEnsemble fit_gradient_boosting(const SupervisedDataset& dataset, const HyperParams& params,
                                          std::uint64_t seed) {
    if (params.algorithm != Algorithm::gradient_boosting)
        throw Error("fit_gradient_boosting: params.algorithm mismatch");
    if (params.n_trees < 0)
        throw Error("fit_gradient_boosting: n_trees must be >= 0");
    if (!(params.learning_rate > 0))
        throw Error("fit_gradient_boosting: learning_rate must be > 0");
    if (dataset.n_rows() == 0)
        throw Error("fit_gradient_boosting: empty dataset");

    TreeEnsemble ensemble;
    ensemble.params = params;
    ensemble.seed = seed;
    ensemble.n_features = dataset.n_cols();

    const std::size_t n = dataset.n_rows();
    ensemble.base_value =
        std::accumulate(dataset.targets.begin(), dataset.targets.end(), 0.0) / static_cast<double>(n);

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i)
        residual[i] = dataset.targets[i] - ensemble.base_value;

    detail::TreeGrowthSpec spec{SplitCriterion::mse, params.max_depth,
                                params.feature_subset.resolve(dataset.n_cols())};
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    for (int t = 0; t < params.n_trees; ++t) {
        RandomSource rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
        detail::TreeBuilder builder(dataset.features, residual, spec, rng);
        RegressionTree tree = builder.build(all_rows);
        for (std::size_t i = 0; i < n; ++i)
            residual[i] -= params.learning_rate * tree.predict_row(dataset.features.row(i));
        ensemble.trees.push_back(std::move(tree));
    }
    return ensemble;
}

/// Dispatch on params.algorithm.
inline TreeEnsemble fit_ensemble(const SupervisedDataset& dataset, const HyperParams& params,
                                 std::uint64_t seed) {
    return params.algorithm == Algorithm::random_forest
               ? fit_random_forest(dataset, params, seed)
               : fit_gradient_boosting(dataset, params, seed);
}

inline std::vector<double> predict(const TreeEnsemble& ensemble, const Matrix& rows) {
    if (rows.n_cols != ensemble.n_features)
        throw Error("predict: expected " + std::to_string(ensemble.n_features) + " columns, got " +
                    std::to_string(rows.n_cols));
    std::vector<double> out(rows.n_rows, 0.0);
    for (const RegressionTree& tree : ensemble.trees)
        for (std::size_t r = 0; r < rows.n_rows; ++r)
            out[r] += tree.predict_row(rows.row(r));
    if (ensemble.params.algorithm == Algorithm::random_forest) {
        if (ensemble.trees.empty())
            throw Error("predict: random forest has no trees");
        for (double& v : out)
            v /= static_cast<double>(ensemble.trees.size());
    } else {
        for (double& v : out)
            v = ensemble.base_value + ensemble.params.learning_rate * v;
    }
    return out;
}

inline std::vector<double> predict(const TreeEnsemble& ensemble, const SupervisedDataset& dataset) {
    return predict(ensemble, dataset.features);
}

struct CvSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
};

/// Expanding-window time-series splits: the validation blocks are the last
/// n_splits equal contiguous chunks (block size floor(n/(n_splits+1)), any
/// remainder stays in the first training window), and split i trains on
/// everything before its block. Rows are time points; never shuffled.
inline std::vector<CvSplit> cv_splits(std::size_t n_rows, int n_splits = 4) {
    if (n_splits < 1)
        throw Error("cv_splits: n_splits must be >= 1");
    if (n_rows < static_cast<std::size_t>(n_splits) + 1)
        throw Error("cv_splits: need at least " + std::to_string(n_splits + 1) + " rows, got " +
                    std::to_string(n_rows));
    std::size_t block = n_rows / (static_cast<std::size_t>(n_splits) + 1);
    std::vector<CvSplit> out;
    for (int i = 0; i < n_splits; ++i) {
        std::size_t val_begin = n_rows - static_cast<std::size_t>(n_splits - i) * block;
        CvSplit split;
        split.train_indices.resize(val_begin);
        std::iota(split.train_indices.begin(), split.train_indices.end(), std::size_t{0});
        split.validation_indices.resize(block);
        std::iota(split.validation_indices.begin(), split.validation_indices.end(), val_begin);
        out.push_back(std::move(split));
    }
    return out;
}

/// Row-subset copy (features, targets, row_weeks; labels shared).
inline SupervisedDataset subset_rows(const SupervisedDataset& dataset,
                                     const std::vector<std::size_t>& indices) {
    SupervisedDataset out;
    out.features = Matrix(indices.size(), dataset.n_cols());
    out.column_labels = dataset.column_labels;
    out.targets.reserve(indices.size());
    out.row_weeks.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::copy_n(dataset.features.row(indices[i]), dataset.n_cols(), &out.features.at(i, 0));
        out.targets.push_back(dataset.targets[indices[i]]);
        out.row_weeks.push_back(dataset.row_weeks[indices[i]]);
    }
    return out;
}

struct GridSearchResult {
    HyperParams best;
    double cv_mae = 0;
    std::size_t best_index = 0;
};

/// Exhaustive search: every candidate is scored by its mean validation MAE
/// over the four expanding-window splits; ties keep the earliest grid
/// entry. Fit seeds derive from (seed, candidate, split), so the outcome
/// is independent of evaluation order.
inline GridSearchResult grid_search(const SupervisedDataset& dataset,
                                    const std::vector<HyperParams>& grid, std::uint64_t seed,
                                    int n_splits = 4) {
    if (grid.empty())
        throw Error("grid_search: empty grid");
    auto splits = cv_splits(dataset.n_rows(), n_splits);

    std::vector<SupervisedDataset> train_sets, val_sets;
    train_sets.reserve(splits.size());
    val_sets.reserve(splits.size());
    for (const CvSplit& s : splits) {
        train_sets.push_back(subset_rows(dataset, s.train_indices));
        val_sets.push_back(subset_rows(dataset, s.validation_indices));
    }

    GridSearchResult result;
    double best_mae = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < grid.size(); ++ci) {
        double total = 0;
        for (std::size_t si = 0; si < splits.size(); ++si) {
            TreeEnsemble model =
                fit_ensemble(train_sets[si], grid[ci], mix_seed(mix_seed(seed, ci), si));
            auto preds = predict(model, val_sets[si]);
            double abs_sum = 0;
            for (std::size_t i = 0; i < preds.size(); ++i)
                abs_sum += std::abs(preds[i] - val_sets[si].targets[i]);
            total += abs_sum / static_cast<double>(preds.size());
        }
        double mean_mae = total / static_cast<double>(splits.size());
        if (mean_mae < best_mae) {
            best_mae = mean_mae;
            result.best = grid[ci];
            result.best_index = ci;
        }
    }
    result.cv_mae = best_mae;
    return result;
}

} // namespace wavecast
