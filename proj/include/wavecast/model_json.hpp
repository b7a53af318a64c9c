#pragma once

#include <json.hpp>

#include "wavecast/learn.hpp"

namespace wavecast {

/// JSON view of a fitted ensemble for inspection and golden tests.
/// Internal nodes carry {feature, threshold, left, right}; leaves {value}.
inline nlohmann::json model_to_json(const TreeEnsemble& ensemble) {
    nlohmann::json out;
    out["algorithm"] = to_string(ensemble.params.algorithm);
    out["n_trees"] = ensemble.trees.size();
    out["n_features"] = ensemble.n_features;
    if (ensemble.params.algorithm == Algorithm::gradient_boosting) {
        out["base_value"] = ensemble.base_value;
        out["learning_rate"] = ensemble.params.learning_rate;
    }
    nlohmann::json trees = nlohmann::json::array();
    for (const RegressionTree& tree : ensemble.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& n : tree.nodes) {
            if (n.is_leaf())
                nodes.push_back({{"value", n.value}});
            else
                nodes.push_back({{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right}});
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    out["trees"] = std::move(trees);
    return out;
}

} // namespace wavecast
