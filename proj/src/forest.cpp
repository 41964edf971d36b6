#include <numeric>

#include "model_factories.hpp"
#include "tree_impl.hpp"

namespace rgs {

using nlohmann::json;

namespace {

class RandomForestModel : public Model {
public:
    std::vector<detail::DecisionTreeModel> trees;
    std::size_t width = 0;

    double score(std::span<const double> row) const override {
        double sum = 0.0;
        for (const auto& t : trees) sum += t.score(row);
        return sum / static_cast<double>(trees.size());
    }
    std::size_t input_width() const override { return width; }
    const char* kind() const override { return "random_forest"; }
    json params_json() const override {
        json j;
        j["width"] = width;
        j["trees"] = json::array();
        for (const auto& t : trees) j["trees"].push_back(t.params_json());
        return j;
    }
};

} // namespace

std::shared_ptr<const Model> fit_random_forest(const Hypes& h, const Dataset& d,
                                               std::uint64_t seed, bool bootstrap) {
    const auto n_estimators = static_cast<std::size_t>(h.integer("n_estimators"));
    detail::TreeParams params = detail::tree_params_for_forest(h);

    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    // "Balanced" uses full-training-set counts, not per-bootstrap counts
    const auto cw = class_weights(h.token("class_weight"), d.n_positive(), d.n_negative());
    std::vector<double> weights(d.n_cases());
    for (std::size_t i = 0; i < d.n_cases(); ++i) weights[i] = cw[d.outcome(i)];

    auto model = std::make_shared<RandomForestModel>();
    model->width = X.width;
    model->trees.reserve(n_estimators);
    const std::size_t n = d.n_cases();
    for (std::size_t t = 0; t < n_estimators; ++t) {
        const std::uint64_t tree_seed = derive_seed(seed, 0xf0e5, t);
        std::vector<std::size_t> rows;
        rows.reserve(n);
        if (bootstrap) {
            Rng rng(derive_seed(tree_seed, 0xb007));
            for (std::size_t i = 0; i < n; ++i)
                rows.push_back(static_cast<std::size_t>(rng.bounded(n)));
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), 0);
        }
        model->trees.push_back(
            detail::build_tree(X.rows, d.outcomes(), weights, rows, params, tree_seed));
    }
    return model;
}

namespace detail {

std::shared_ptr<const Model> forest_from_json(const json& j) {
    auto m = std::make_shared<RandomForestModel>();
    m->width = j.at("width").get<std::size_t>();
    for (const auto& jt : j.at("trees"))
        m->trees.push_back(DecisionTreeModel::from_json(jt));
    return m;
}

} // namespace detail

} // namespace rgs
