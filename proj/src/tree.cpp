#include "tree_impl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_factories.hpp"

namespace rgs {

Criterion parse_criterion(const std::string& token) {
    if (token == "Gini") return Criterion::Gini;
    if (token == "Entropy") return Criterion::Entropy;
    if (token == "Log_loss") return Criterion::LogLoss;
    throw DataError("unknown criterion token: " + token);
}

double impurity(double weight_pos, double weight_neg, Criterion c) {
    const double total = weight_pos + weight_neg;
    if (total <= 0.0) throw DataError("impurity of an empty node");
    const double p = weight_pos / total;
    const double q = 1.0 - p;
    switch (c) {
        case Criterion::Gini:
            return 2.0 * p * q;
        case Criterion::Entropy: {
            double h = 0.0;
            if (p > 0) h -= p * std::log2(p);
            if (q > 0) h -= q * std::log2(q);
            return h;
        }
        case Criterion::LogLoss: {
            // natural-log entropy; same split ranking as Entropy
            double h = 0.0;
            if (p > 0) h -= p * std::log(p);
            if (q > 0) h -= q * std::log(q);
            return h;
        }
    }
    return 0.0;
}

namespace detail {

namespace {

struct NodeStats {
    double wpos = 0, wneg = 0;
    std::size_t n = 0;
};

struct Candidate {
    bool valid = false;
    int feature = -1;
    double improvement = 0.0;
};

struct Pending {
    int node_id;
    std::size_t begin, end;
    long long depth;
    Candidate split;
};

struct PendingOrder {
    // max-improvement first; ties resolved by creation order
    bool operator()(const Pending& a, const Pending& b) const {
        if (a.split.improvement != b.split.improvement)
            return a.split.improvement < b.split.improvement;
        return a.node_id > b.node_id;
    }
};

} // namespace

DecisionTreeModel build_tree(const std::vector<std::vector<double>>& X,
                             std::span<const std::uint8_t> y, std::span<const double> weights,
                             std::span<const std::size_t> row_indices, const TreeParams& params,
                             std::uint64_t seed) {
    DecisionTreeModel model;
    model.width = X.empty() ? 0 : X[0].size();
    const std::size_t n_features = model.width;

    std::vector<std::size_t> idx(row_indices.begin(), row_indices.end());
    double root_weight = 0.0;
    for (std::size_t i : idx) root_weight += weights[i];

    auto stats_of = [&](std::size_t begin, std::size_t end) {
        NodeStats s;
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t i = idx[k];
            (y[i] ? s.wpos : s.wneg) += weights[i];
            ++s.n;
        }
        return s;
    };

    std::vector<std::size_t> feature_order(n_features);
    std::iota(feature_order.begin(), feature_order.end(), 0);

    // Evaluate the node's split; feature subsets and the random splitter
    // draw from an rng derived from the node id, so the result does not
    // depend on expansion order.
    auto eval_split = [&](int node_id, std::size_t begin, std::size_t end, long long depth,
                          const NodeStats& s) {
        Candidate best;
        if (params.max_depth >= 0 && depth >= params.max_depth) return best;
        if (static_cast<long long>(s.n) < params.min_samples_split) return best;
        const double node_w = s.wpos + s.wneg;
        const double node_imp = impurity(s.wpos, s.wneg, params.criterion);
        if (node_imp <= 0.0) return best;

        std::vector<std::size_t> candidates = feature_order;
        std::size_t n_cand = n_features;
        Rng rng(derive_seed(seed, 0x7ee5, static_cast<std::uint64_t>(node_id)));
        const bool subset = params.max_features >= 0 &&
                            static_cast<std::size_t>(params.max_features) < n_features;
        if (subset || params.random_splitter) {
            rng.shuffle(candidates);
            if (subset) n_cand = static_cast<std::size_t>(params.max_features);
        }

        for (std::size_t c = 0; c < n_cand; ++c) {
            const std::size_t f = candidates[c];
            double rpos = 0, rneg = 0;
            std::size_t rn = 0;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = idx[k];
                if (X[i][f] > 0.5) {
                    (y[i] ? rpos : rneg) += weights[i];
                    ++rn;
                }
            }
            const std::size_t ln = s.n - rn;
            if (static_cast<long long>(ln) < params.min_samples_leaf ||
                static_cast<long long>(rn) < params.min_samples_leaf)
                continue;
            const double lw = node_w - (rpos + rneg);
            const double rw = rpos + rneg;
            if (lw < params.min_weight_fraction_leaf * root_weight ||
                rw < params.min_weight_fraction_leaf * root_weight)
                continue;
            const double limp = impurity(s.wpos - rpos, s.wneg - rneg, params.criterion);
            const double rimp = impurity(rpos, rneg, params.criterion);
            const double improvement =
                node_w / root_weight *
                (node_imp - (lw / node_w) * limp - (rw / node_w) * rimp);
            if (improvement < params.min_impurity_decrease) {
                if (params.random_splitter) break; // the drawn split failed; node stays a leaf
                continue;
            }
            if (params.random_splitter) {
                best.valid = true;
                best.feature = static_cast<int>(f);
                best.improvement = improvement;
                break; // first structurally valid feature in shuffled order
            }
            if (!best.valid || improvement > best.improvement ||
                (improvement == best.improvement && f < static_cast<std::size_t>(best.feature))) {
                best.valid = true;
                best.feature = static_cast<int>(f);
                best.improvement = improvement;
            }
        }
        return best;
    };

    const NodeStats root_stats = stats_of(0, idx.size());
    TreeNode root;
    root.leaf = root_stats.wpos / (root_stats.wpos + root_stats.wneg);
    model.nodes.push_back(root);

    std::priority_queue<Pending, std::vector<Pending>, PendingOrder> queue;
    Candidate root_split = eval_split(0, 0, idx.size(), 0, root_stats);
    if (root_split.valid) queue.push({0, 0, idx.size(), 0, root_split});

    long long leaves = 1;
    while (!queue.empty() &&
           (params.max_leaf_nodes < 0 || leaves < params.max_leaf_nodes)) {
        const Pending node = queue.top();
        queue.pop();
        const std::size_t f = static_cast<std::size_t>(node.split.feature);
        auto mid_it = std::stable_partition(idx.begin() + node.begin, idx.begin() + node.end,
                                            [&](std::size_t i) { return X[i][f] <= 0.5; });
        const std::size_t mid = static_cast<std::size_t>(mid_it - idx.begin());

        const NodeStats ls = stats_of(node.begin, mid);
        const NodeStats rs = stats_of(mid, node.end);
        const int left_id = static_cast<int>(model.nodes.size());
        const int right_id = left_id + 1;
        TreeNode left, right;
        left.leaf = ls.wpos / (ls.wpos + ls.wneg);
        right.leaf = rs.wpos / (rs.wpos + rs.wneg);
        model.nodes.push_back(left);
        model.nodes.push_back(right);
        model.nodes[node.node_id].feature = node.split.feature;
        model.nodes[node.node_id].left = left_id;
        model.nodes[node.node_id].right = right_id;
        ++leaves;

        Candidate lc = eval_split(left_id, node.begin, mid, node.depth + 1, ls);
        if (lc.valid) queue.push({left_id, node.begin, mid, node.depth + 1, lc});
        Candidate rc = eval_split(right_id, mid, node.end, node.depth + 1, rs);
        if (rc.valid) queue.push({right_id, mid, node.end, node.depth + 1, rc});
    }
    return model;
}

} // namespace detail

namespace {

detail::TreeParams tree_params_from_hypes(const Hypes& h) {
    detail::TreeParams p;
    p.criterion = parse_criterion(h.token("criterion"));
    p.max_depth = h.integer("max_depth");
    p.min_samples_split = h.integer("min_samples_split");
    p.min_samples_leaf = h.integer("min_samples_leaf");
    p.min_weight_fraction_leaf = h.num("min_weight_fraction_leaf");
    p.max_features = h.integer("max_features");
    p.max_leaf_nodes = h.integer("max_leaf_nodes");
    p.min_impurity_decrease = h.num("min_impurity_decrease");
    return p;
}

} // namespace

std::shared_ptr<const Model> fit_decision_tree(const Hypes& h, const Dataset& d,
                                               std::uint64_t seed) {
    detail::TreeParams p = tree_params_from_hypes(h);
    p.random_splitter = h.token("splitter") == "Random";

    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    const auto cw = class_weights(h.token("class_weight"), d.n_positive(), d.n_negative());
    std::vector<double> weights(d.n_cases());
    for (std::size_t i = 0; i < d.n_cases(); ++i) weights[i] = cw[d.outcome(i)];
    std::vector<std::size_t> rows(d.n_cases());
    std::iota(rows.begin(), rows.end(), 0);

    auto model = std::make_shared<detail::DecisionTreeModel>(
        detail::build_tree(X.rows, d.outcomes(), weights, rows, p, seed));
    return model;
}

namespace detail {

std::shared_ptr<const Model> tree_from_json(const nlohmann::json& j) {
    return std::make_shared<DecisionTreeModel>(DecisionTreeModel::from_json(j));
}

TreeParams tree_params_for_forest(const Hypes& h) {
    TreeParams p;
    p.criterion = parse_criterion(h.token("criterion"));
    p.max_depth = h.integer("max_depth");
    p.min_samples_split = h.integer("min_samples_split");
    p.min_samples_leaf = h.integer("min_samples_leaf");
    p.min_weight_fraction_leaf = h.num("min_weight_fraction_leaf");
    p.max_features = h.integer("max_features");
    p.max_leaf_nodes = h.integer("max_leaf_nodes");
    p.min_impurity_decrease = h.num("min_impurity_decrease");
    return p;
}

} // namespace detail

} // namespace rgs
