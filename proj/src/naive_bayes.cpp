#include <cmath>

#include "model_factories.hpp"
#include "rgs/learners.hpp"

namespace rgs {

using nlohmann::json;

double nb_class_conditional(double count, double class_total, double alpha,
                            std::size_t n_categories) {
    const double denom = class_total + alpha * static_cast<double>(n_categories);
    if (denom <= 0.0)
        throw NumericError("smoothing alpha = 0 with an empty class leaves no mass");
    return (count + alpha) / denom;
}

namespace {

// Categorical naive Bayes over ordinal category indices. Scoring also
// accepts one-hot-width rows, reading each column block as a probability
// mixture over that column's categories; this is what lets the explainer
// feed fractional background rows through the model.
class NaiveBayesModel : public Model {
public:
    double alpha = 1.0;
    std::vector<double> log_prior;            // [class]
    std::vector<std::size_t> cards;           // per-feature vocabulary size
    std::vector<std::size_t> n_cats;          // per-feature smoothing category count
    std::vector<std::vector<double>> counts;  // [feature][cat * 2 + class]
    double class_total[2] = {0, 0};

    std::size_t onehot_width() const {
        std::size_t w = 0;
        for (auto c : cards) w += c;
        return w;
    }

    double cond(std::size_t feature, std::size_t cat, int cls) const {
        return nb_class_conditional(counts[feature][cat * 2 + cls], class_total[cls], alpha,
                                    n_cats[feature]);
    }

    double score(std::span<const double> row) const override {
        double lp[2] = {log_prior[0], log_prior[1]};
        if (row.size() == cards.size()) {
            for (std::size_t f = 0; f < cards.size(); ++f) {
                auto cat = static_cast<long long>(std::llround(row[f]));
                if (cat < 0 || cat >= static_cast<long long>(cards[f]))
                    throw DataError("ordinal value out of range for feature " +
                                    std::to_string(f));
                for (int c = 0; c < 2; ++c)
                    lp[c] += std::log(cond(f, static_cast<std::size_t>(cat), c));
            }
        } else if (row.size() == onehot_width()) {
            std::size_t at = 0;
            for (std::size_t f = 0; f < cards.size(); ++f) {
                double total = 0.0;
                for (std::size_t cat = 0; cat < cards[f]; ++cat) total += row[at + cat];
                for (int c = 0; c < 2; ++c) {
                    double mix = 0.0;
                    for (std::size_t cat = 0; cat < cards[f]; ++cat) {
                        const double w = total > 0.0 ? row[at + cat] / total
                                                     : 1.0 / static_cast<double>(cards[f]);
                        mix += w * cond(f, cat, c);
                    }
                    lp[c] += std::log(mix);
                }
                at += cards[f];
            }
        } else {
            throw DataError("row width matches neither ordinal nor one-hot layout");
        }
        const double m = std::max(lp[0], lp[1]);
        const double e0 = std::exp(lp[0] - m), e1 = std::exp(lp[1] - m);
        return e1 / (e0 + e1);
    }

    std::size_t input_width() const override { return cards.size(); }
    const char* kind() const override { return "naive_bayes"; }

    json params_json() const override {
        json j;
        j["alpha"] = alpha;
        j["log_prior"] = log_prior;
        j["cards"] = cards;
        j["n_cats"] = n_cats;
        j["counts"] = counts;
        j["class_total"] = {class_total[0], class_total[1]};
        return j;
    }
};

} // namespace

std::shared_ptr<const Model> fit_naive_bayes(const Hypes& h, const Dataset& d) {
    auto m = std::make_shared<NaiveBayesModel>();
    m->alpha = h.num("alpha");
    const auto min_categories = static_cast<std::size_t>(h.integer("min_categories"));
    const bool fit_prior = h.token("fit_prior") == "True";

    const auto& schema = d.schema();
    m->cards.reserve(schema.n_predictors());
    for (const auto& col : schema.predictors()) {
        m->cards.push_back(col.categories.size());
        m->n_cats.push_back(std::max(col.categories.size(), min_categories));
    }
    m->counts.assign(schema.n_predictors(), {});
    for (std::size_t f = 0; f < schema.n_predictors(); ++f)
        m->counts[f].assign(m->cards[f] * 2, 0.0);

    for (std::size_t r = 0; r < d.n_cases(); ++r) {
        const int cls = d.outcome(r) ? 1 : 0;
        m->class_total[cls] += 1.0;
        for (std::size_t f = 0; f < schema.n_predictors(); ++f)
            m->counts[f][d.row(r)[f] * 2 + cls] += 1.0;
    }
    if (fit_prior) {
        const double n = static_cast<double>(d.n_cases());
        m->log_prior = {std::log(m->class_total[0] / n), std::log(m->class_total[1] / n)};
    } else {
        m->log_prior = {std::log(0.5), std::log(0.5)};
    }
    return m;
}

namespace detail {

std::shared_ptr<const Model> nb_from_json(const json& j) {
    auto m = std::make_shared<NaiveBayesModel>();
    m->alpha = j.at("alpha").get<double>();
    m->log_prior = j.at("log_prior").get<std::vector<double>>();
    m->cards = j.at("cards").get<std::vector<std::size_t>>();
    m->n_cats = j.at("n_cats").get<std::vector<std::size_t>>();
    m->counts = j.at("counts").get<std::vector<std::vector<double>>>();
    m->class_total[0] = j.at("class_total").at(0).get<double>();
    m->class_total[1] = j.at("class_total").at(1).get<double>();
    return m;
}

} // namespace detail

} // namespace rgs
