#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgs/learners.hpp"
#include "rgs/model.hpp"
#include "rgs/rng.hpp"

namespace rgs::detail {

struct TreeNode {
    int feature = -1; // -1 = leaf
    int left = -1;
    int right = -1;
    double leaf = 0.0; // weighted positive fraction
};

struct TreeParams {
    Criterion criterion = Criterion::Gini;
    bool random_splitter = false;
    long long max_depth = -1; // -1 = unbounded
    long long min_samples_split = 2;
    long long min_samples_leaf = 1;
    double min_weight_fraction_leaf = 0.0;
    long long max_features = -1;   // -1 = all
    long long max_leaf_nodes = -1; // -1 = unbounded
    double min_impurity_decrease = 0.0;
};

// One-hot feature columns are binary, so the only split per feature is at
// 0.5; fractional explainer rows route through the same comparison.
class DecisionTreeModel : public Model {
public:
    std::vector<TreeNode> nodes;
    std::size_t width = 0;

    double score(std::span<const double> row) const override {
        if (row.size() != width) throw DataError("row width does not match tree input");
        int at = 0;
        while (nodes[at].feature >= 0)
            at = row[nodes[at].feature] > 0.5 ? nodes[at].right : nodes[at].left;
        return nodes[at].leaf;
    }
    std::size_t input_width() const override { return width; }
    const char* kind() const override { return "decision_tree"; }

    nlohmann::json params_json() const override {
        nlohmann::json j;
        j["width"] = width;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& n : nodes)
            arr.push_back({n.feature, n.left, n.right, n.leaf});
        j["nodes"] = arr;
        return j;
    }

    static DecisionTreeModel from_json(const nlohmann::json& j) {
        DecisionTreeModel m;
        m.width = j.at("width").get<std::size_t>();
        for (const auto& jn : j.at("nodes")) {
            TreeNode n;
            n.feature = jn.at(0).get<int>();
            n.left = jn.at(1).get<int>();
            n.right = jn.at(2).get<int>();
            n.leaf = jn.at(3).get<double>();
            m.nodes.push_back(n);
        }
        return m;
    }

    // depth of the node subtree; used by structural tests
    int depth() const { return node_depth(0); }

private:
    int node_depth(int at) const {
        if (nodes[at].feature < 0) return 0;
        return 1 + std::max(node_depth(nodes[at].left), node_depth(nodes[at].right));
    }
};

DecisionTreeModel build_tree(const std::vector<std::vector<double>>& X,
                             std::span<const std::uint8_t> y, std::span<const double> weights,
                             std::span<const std::size_t> row_indices, const TreeParams& params,
                             std::uint64_t seed);

TreeParams tree_params_for_forest(const Hypes& h);

} // namespace rgs::detail
