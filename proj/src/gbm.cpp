#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_factories.hpp"
#include "rgs/learners.hpp"
#include "rgs/rng.hpp"

namespace rgs {

using nlohmann::json;

double xgb_leaf_weight(double G, double H, double lambda, double alpha) {
    const double denom = H + lambda;
    if (!(denom > 0.0)) throw NumericError("leaf weight needs H + lambda > 0");
    const double t = std::abs(G) - alpha;
    const double shrunk = t > 0.0 ? (G > 0 ? t : -t) : 0.0;
    return -shrunk / denom;
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

constexpr int kBoostRounds = 100; // round count is not an axis; library default
constexpr double kMinChildHessian = 1e-6;

struct GbNode {
    int feature = -1;
    int left = -1, right = -1;
    double value = 0.0; // eta-scaled leaf weight
};

struct GbTree {
    std::vector<GbNode> nodes;

    double eval(std::span<const double> row) const {
        int at = 0;
        while (nodes[at].feature >= 0)
            at = row[nodes[at].feature] > 0.5 ? nodes[at].right : nodes[at].left;
        return nodes[at].value;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& n : nodes) arr.push_back({n.feature, n.left, n.right, n.value});
        return arr;
    }
    static GbTree from_json(const json& j) {
        GbTree t;
        for (const auto& jn : j) {
            GbNode n;
            n.feature = jn.at(0).get<int>();
            n.left = jn.at(1).get<int>();
            n.right = jn.at(2).get<int>();
            n.value = jn.at(3).get<double>();
            t.nodes.push_back(n);
        }
        return t;
    }
};

class GbTreeModel : public Model {
public:
    std::vector<GbTree> trees;
    std::size_t width = 0;

    double margin(std::span<const double> row) const {
        double f = 0.0;
        for (const auto& t : trees) f += t.eval(row);
        return f;
    }
    double score(std::span<const double> row) const override {
        if (row.size() != width) throw DataError("row width does not match booster input");
        return sigmoid(margin(row));
    }
    std::size_t input_width() const override { return width; }
    const char* kind() const override { return "gbtree"; }
    json params_json() const override {
        json j;
        j["width"] = width;
        j["trees"] = json::array();
        for (const auto& t : trees) j["trees"].push_back(t.to_json());
        return j;
    }
};

class GbLinearModel : public Model {
public:
    std::vector<double> w;
    double b = 0.0;

    double score(std::span<const double> row) const override {
        if (row.size() != w.size()) throw DataError("row width does not match booster input");
        double z = b;
        for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * row[f];
        return sigmoid(z);
    }
    std::size_t input_width() const override { return w.size(); }
    const char* kind() const override { return "gblinear"; }
    json params_json() const override {
        json j;
        j["w"] = w;
        j["b"] = b;
        return j;
    }
};

struct SplitStats {
    double G = 0, H = 0;
};

double leaf_score(double G, double H, double lambda, double alpha) {
    const double t = std::abs(G) - alpha;
    const double shrunk = t > 0.0 ? t : 0.0;
    return shrunk * shrunk / (H + lambda);
}

struct GbTreeBuilder {
    const std::vector<std::vector<double>>& X;
    std::span<const double> grad;
    std::span<const double> hess;
    double eta, gamma, lambda, alpha;
    long long max_depth;
    GbTree tree;

    int build(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
              long long depth) {
        SplitStats node;
        for (std::size_t k = begin; k < end; ++k) {
            node.G += grad[rows[k]];
            node.H += hess[rows[k]];
        }
        return grow(rows, begin, end, depth, node);
    }

    int grow(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
             long long depth, const SplitStats& node) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(GbNode{});
        // floor the hessian so a saturated node cannot blow the weight up
        tree.nodes[id].value =
            eta * xgb_leaf_weight(node.G, std::max(node.H, kMinChildHessian), lambda, alpha);

        if (depth >= max_depth) return id;
        const std::size_t n_features = X.empty() ? 0 : X[0].size();
        int best_f = -1;
        double best_gain = 0.0;
        SplitStats best_right;
        for (std::size_t f = 0; f < n_features; ++f) {
            SplitStats right;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = rows[k];
                if (X[i][f] > 0.5) {
                    right.G += grad[i];
                    right.H += hess[i];
                }
            }
            const SplitStats left{node.G - right.G, node.H - right.H};
            if (left.H < kMinChildHessian || right.H < kMinChildHessian) continue;
            const double gain = 0.5 * (leaf_score(left.G, left.H, lambda, alpha) +
                                       leaf_score(right.G, right.H, lambda, alpha) -
                                       leaf_score(node.G, node.H, lambda, alpha)) -
                                gamma;
            if (gain > best_gain) {
                best_gain = gain;
                best_f = static_cast<int>(f);
                best_right = right;
            }
        }
        if (best_f < 0) return id;

        auto mid_it = std::stable_partition(
            rows.begin() + begin, rows.begin() + end,
            [&](std::size_t i) { return X[i][static_cast<std::size_t>(best_f)] <= 0.5; });
        const std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());
        const SplitStats left{node.G - best_right.G, node.H - best_right.H};
        const int l = grow(rows, begin, mid, depth + 1, left);
        const int r = grow(rows, mid, end, depth + 1, best_right);
        tree.nodes[id].feature = best_f;
        tree.nodes[id].left = l;
        tree.nodes[id].right = r;
        return id;
    }
};

} // namespace

std::shared_ptr<const Model> fit_xgboost(const Hypes& h, const Dataset& d, std::uint64_t seed,
                                         std::vector<std::string>& warnings) {
    std::string booster = h.token("booster");
    if (booster == "Dart") {
        warnings.push_back("booster Dart runs as Gbtree (dropout mechanics not implemented)");
        booster = "Gbtree";
    }
    const std::string tree_method = h.token("tree_method");
    if (tree_method == "Approx" || tree_method == "Hist")
        warnings.push_back("tree_method " + tree_method + " runs the exact greedy algorithm");
    if (h.token("sampling_method") == "Gradient_based")
        warnings.push_back("sampling_method Gradient_based runs as uniform subsampling");
    if (h.token("objective") != "Binary:logistic")
        throw DataError("unknown objective: " + h.token("objective"));

    const double eta = h.num("eta");
    const double gamma = h.num("gamma");
    const double lambda = h.num("lambda");
    const double alpha = h.num("alpha");
    const double subsample = h.num("subsample");
    const long long max_depth = h.integer("max_depth");

    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    const std::size_t n = d.n_cases();
    std::vector<double> margin(n, 0.0); // base score 0.5 in logit space

    if (booster == "Gblinear") {
        auto model = std::make_shared<GbLinearModel>();
        model->w.assign(X.width, 0.0);
        for (int round = 0; round < kBoostRounds; ++round) {
            std::vector<double> g(n), hh(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double p = sigmoid(margin[i]);
                g[i] = p - d.outcome(i);
                hh[i] = std::max(p * (1.0 - p), 1e-16);
            }
            double gb = 0, hb = 0;
            for (std::size_t i = 0; i < n; ++i) {
                gb += g[i];
                hb += hh[i];
            }
            const double db = -eta * gb / hb;
            model->b += db;
            for (std::size_t i = 0; i < n; ++i) margin[i] += db;
            for (std::size_t f = 0; f < X.width; ++f) {
                double gf = lambda * model->w[f], hf = lambda;
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = X.rows[i][f];
                    if (x != 0.0) {
                        const double p = sigmoid(margin[i]);
                        gf += (p - d.outcome(i)) * x;
                        hf += std::max(p * (1.0 - p), 1e-16) * x * x;
                    }
                }
                // proximal Newton coordinate step with L1 shrinkage toward 0
                const double target = model->w[f] - gf / hf;
                const double width_ = alpha / hf;
                double nw = target > width_ ? target - width_
                                            : (target < -width_ ? target + width_ : 0.0);
                const double dw = eta * (nw - model->w[f]);
                if (dw == 0.0) continue;
                model->w[f] += dw;
                for (std::size_t i = 0; i < n; ++i)
                    if (X.rows[i][f] != 0.0) margin[i] += dw * X.rows[i][f];
            }
        }
        return model;
    }

    auto model = std::make_shared<GbTreeModel>();
    model->width = X.width;
    Rng rng(derive_seed(seed, 0x9b00));
    std::vector<double> g(n), hh(n);
    for (int round = 0; round < kBoostRounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            g[i] = p - d.outcome(i);
            hh[i] = std::max(p * (1.0 - p), 1e-16);
        }
        std::vector<std::size_t> rows;
        rows.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if (subsample >= 1.0 || rng.real01() < subsample) rows.push_back(i);
        if (rows.empty()) continue;

        GbTreeBuilder builder{X.rows, g, hh, eta, gamma, lambda, alpha, max_depth, {}};
        builder.build(rows, 0, rows.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += builder.tree.eval(X.rows[i]);
            margin[i] = std::clamp(margin[i], -30.0, 30.0);
        }
        model->trees.push_back(std::move(builder.tree));
    }
    return model;
}

namespace detail {

std::shared_ptr<const Model> gbtree_from_json(const json& j) {
    auto m = std::make_shared<GbTreeModel>();
    m->width = j.at("width").get<std::size_t>();
    for (const auto& jt : j.at("trees")) m->trees.push_back(GbTree::from_json(jt));
    return m;
}

std::shared_ptr<const Model> gblinear_from_json(const json& j) {
    auto m = std::make_shared<GbLinearModel>();
    m->w = j.at("w").get<std::vector<double>>();
    m->b = j.at("b").get<double>();
    return m;
}

} // namespace detail

} // namespace rgs
