#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_factories.hpp"
#include "rgs/learners.hpp"

namespace rgs {

using nlohmann::json;

double knn_score(std::span<const std::uint8_t> neighbor_labels,
                 std::span<const double> neighbor_distances, KnnWeights weights) {
    if (neighbor_labels.empty() || neighbor_labels.size() != neighbor_distances.size())
        throw DataError("neighbor labels and distances must be non-empty and equal length");

    // exact matches dominate: majority label among zero-distance neighbors
    std::size_t zero_pos = 0, zero_total = 0;
    for (std::size_t i = 0; i < neighbor_distances.size(); ++i) {
        if (neighbor_distances[i] == 0.0) {
            ++zero_total;
            zero_pos += neighbor_labels[i] ? 1 : 0;
        }
    }
    if (zero_total > 0) {
        if (2 * zero_pos > zero_total) return 1.0;
        if (2 * zero_pos < zero_total) return 0.0;
        return 0.5;
    }

    if (weights == KnnWeights::Uniform) {
        std::size_t pos = 0;
        for (auto l : neighbor_labels) pos += l ? 1 : 0;
        return static_cast<double>(pos) / static_cast<double>(neighbor_labels.size());
    }
    double wpos = 0.0, wtotal = 0.0;
    for (std::size_t i = 0; i < neighbor_labels.size(); ++i) {
        const double w = 1.0 / neighbor_distances[i];
        wtotal += w;
        if (neighbor_labels[i]) wpos += w;
    }
    return wpos / wtotal;
}

namespace {

class KnnModel : public Model {
public:
    std::vector<std::vector<double>> rows;
    std::vector<std::uint8_t> labels;
    std::size_t k = 1;
    KnnWeights weights = KnnWeights::Uniform;

    double score(std::span<const double> row) const override {
        if (row.size() != rows[0].size()) throw DataError("row width does not match KNN input");
        std::vector<std::pair<double, std::size_t>> dist(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double d2 = 0.0;
            for (std::size_t f = 0; f < row.size(); ++f) {
                const double diff = rows[i][f] - row[f];
                d2 += diff * diff;
            }
            dist[i] = {std::sqrt(d2), i};
        }
        // ties in distance resolve by training index to keep scoring stable
        std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
        std::vector<std::uint8_t> nl(k);
        std::vector<double> nd(k);
        for (std::size_t i = 0; i < k; ++i) {
            nl[i] = labels[dist[i].second];
            nd[i] = dist[i].first;
        }
        return knn_score(nl, nd, weights);
    }
    std::size_t input_width() const override { return rows.empty() ? 0 : rows[0].size(); }
    const char* kind() const override { return "knn"; }
    json params_json() const override {
        json j;
        j["rows"] = rows;
        j["labels"] = labels;
        j["k"] = k;
        j["weights"] = weights == KnnWeights::Uniform ? "uniform" : "distance";
        return j;
    }
};

} // namespace

std::shared_ptr<const Model> fit_knn(const Hypes& h, const Dataset& d,
                                     std::vector<std::string>& warnings) {
    auto model = std::make_shared<KnnModel>();
    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    model->rows = X.rows;
    model->labels.assign(d.outcomes().begin(), d.outcomes().end());

    auto k = static_cast<std::size_t>(h.integer("n_neighbors"));
    if (k > d.n_cases()) {
        warnings.push_back("n_neighbors " + std::to_string(k) + " clamped to " +
                           std::to_string(d.n_cases()) + " training cases");
        k = d.n_cases();
    }
    model->k = k;

    const std::string wtoken = h.token("weights");
    if (wtoken == "Uniform") {
        model->weights = KnnWeights::Uniform;
    } else if (wtoken == "Distance") {
        model->weights = KnnWeights::Distance;
    } else if (wtoken == "None") {
        // the source library leaves this token undefined; treat as Uniform
        warnings.push_back("weights None treated as Uniform");
        model->weights = KnnWeights::Uniform;
    } else {
        throw DataError("unknown weights token: " + wtoken);
    }
    // algorithm and leaf_size pick the reference library's search structure;
    // they cannot change predictions, and this implementation is brute-force
    (void)h.token("algorithm");
    (void)h.integer("leaf_size");
    return model;
}

namespace detail {

std::shared_ptr<const Model> knn_from_json(const json& j) {
    auto m = std::make_shared<KnnModel>();
    m->rows = j.at("rows").get<std::vector<std::vector<double>>>();
    m->labels = j.at("labels").get<std::vector<std::uint8_t>>();
    m->k = j.at("k").get<std::size_t>();
    m->weights =
        j.at("weights").get<std::string>() == "uniform" ? KnnWeights::Uniform : KnnWeights::Distance;
    return m;
}

} // namespace detail

} // namespace rgs
