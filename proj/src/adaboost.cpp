#include <cmath>
#include <numeric>

#include "model_factories.hpp"
#include "tree_impl.hpp"

namespace rgs {

using nlohmann::json;

double adaboost_stage_weight(double err, std::size_t n_classes) {
    const double bar = 1.0 - 1.0 / static_cast<double>(n_classes);
    if (err >= bar)
        throw NumericError("stage error " + std::to_string(err) +
                           " is no better than chance; stage rejected");
    if (err <= 0.0) return std::log(1e12); // perfectly separating stage, capped
    return std::log((1.0 - err) / err) + std::log(static_cast<double>(n_classes) - 1.0);
}

namespace {

class AdaBoostModel : public Model {
public:
    std::vector<detail::DecisionTreeModel> stumps;
    std::vector<double> stage_weights;
    std::size_t width = 0;

    double score(std::span<const double> row) const override {
        double total = 0.0, votes = 0.0;
        for (std::size_t t = 0; t < stumps.size(); ++t) {
            total += stage_weights[t];
            if (stumps[t].score(row) >= 0.5) votes += stage_weights[t];
        }
        return total > 0.0 ? votes / total : 0.5;
    }
    std::size_t input_width() const override { return width; }
    const char* kind() const override { return "adaboost"; }
    json params_json() const override {
        json j;
        j["width"] = width;
        j["stage_weights"] = stage_weights;
        j["stumps"] = json::array();
        for (const auto& s : stumps) j["stumps"].push_back(s.params_json());
        return j;
    }
};

} // namespace

std::shared_ptr<const Model> fit_adaboost(const Hypes& h, const Dataset& d) {
    const auto n_estimators = static_cast<std::size_t>(h.integer("n_estimators"));
    const double learning_rate = h.num("learning_rate");
    if (h.token("algorithm") != "SAMME")
        throw DataError("unknown boosting algorithm: " + h.token("algorithm"));

    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    const std::size_t n = d.n_cases();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);

    detail::TreeParams stump;
    stump.max_depth = 1; // the base estimator is a depth-1 tree

    auto model = std::make_shared<AdaBoostModel>();
    model->width = X.width;
    for (std::size_t t = 0; t < n_estimators; ++t) {
        auto tree = detail::build_tree(X.rows, d.outcomes(), w, rows, stump, 0);
        double err = 0.0;
        std::vector<std::uint8_t> miss(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int pred = tree.score(X.rows[i]) >= 0.5 ? 1 : 0;
            miss[i] = pred != d.outcome(i);
            if (miss[i]) err += w[i];
        }
        double stage;
        try {
            stage = adaboost_stage_weight(err, 2);
        } catch (const NumericError&) {
            break; // worse than chance: boosting stops here
        }
        const double alpha = learning_rate * stage;
        model->stumps.push_back(std::move(tree));
        model->stage_weights.push_back(alpha);

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (miss[i]) w[i] *= std::exp(alpha);
            sum += w[i];
        }
        for (auto& wi : w) wi /= sum; // case weights always sum to 1
    }
    return model;
}

namespace detail {

std::shared_ptr<const Model> adaboost_from_json(const json& j) {
    auto m = std::make_shared<AdaBoostModel>();
    m->width = j.at("width").get<std::size_t>();
    m->stage_weights = j.at("stage_weights").get<std::vector<double>>();
    for (const auto& js : j.at("stumps"))
        m->stumps.push_back(DecisionTreeModel::from_json(js));
    return m;
}

} // namespace detail

} // namespace rgs
