#include <cmath>

#include "model_factories.hpp"
#include "rgs/learners.hpp"

namespace rgs {

using nlohmann::json;

Penalty parse_penalty(const std::string& token) {
    if (token == "None") return Penalty::None;
    if (token == "L1") return Penalty::L1;
    if (token == "L2") return Penalty::L2;
    if (token == "Elasticnet") return Penalty::Elasticnet;
    throw DataError("unknown penalty token: " + token);
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(-|z|)) + max(z,0) - z*y, the stable weighted BCE building block
double bce_term(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

// elasticnet mixes L1 and L2 halves; the axis carries no ratio, so it is 0.5
constexpr double kElasticRatio = 0.5;

void penalty_terms(Penalty p, double& l1_scale, double& l2_scale) {
    l1_scale = l2_scale = 0.0;
    switch (p) {
        case Penalty::None: break;
        case Penalty::L1: l1_scale = 1.0; break;
        case Penalty::L2: l2_scale = 1.0; break;
        case Penalty::Elasticnet:
            l1_scale = kElasticRatio;
            l2_scale = 1.0 - kElasticRatio;
            break;
    }
}

class LogisticModel : public Model {
public:
    std::vector<double> w;
    double b = 0.0;
    std::string solver; // recorded; selects nothing beyond iteration policy

    double score(std::span<const double> row) const override {
        if (row.size() != w.size()) throw DataError("row width does not match weight vector");
        double z = b;
        for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * row[i];
        return sigmoid(z);
    }
    std::size_t input_width() const override { return w.size(); }
    const char* kind() const override { return "logistic"; }
    json params_json() const override {
        json j;
        j["w"] = w;
        j["b"] = b;
        j["solver"] = solver;
        return j;
    }
};

} // namespace

double logistic_loss(std::span<const double> w, double b, const LogisticBatch& batch,
                     Penalty penalty, double C, std::span<const double> class_w) {
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
        double z = b;
        for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * batch.rows[i][f];
        loss += class_w[batch.labels[i]] * bce_term(z, batch.labels[i]);
    }
    double l1s, l2s;
    penalty_terms(penalty, l1s, l2s);
    if (l1s > 0 || l2s > 0) {
        if (!(C > 0)) throw DataError("penalized loss needs C > 0");
        double l1 = 0, l2 = 0;
        for (double v : w) {
            l1 += std::abs(v);
            l2 += 0.5 * v * v;
        }
        loss += (l1s * l1 + l2s * l2) / C;
    }
    return loss;
}

std::vector<double> logistic_gradient(std::span<const double> w, double b,
                                      const LogisticBatch& batch, Penalty penalty, double C,
                                      std::span<const double> class_w) {
    std::vector<double> grad(w.size() + 1, 0.0);
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
        double z = b;
        for (std::size_t f = 0; f < w.size(); ++f) z += w[f] * batch.rows[i][f];
        const double resid = class_w[batch.labels[i]] * (sigmoid(z) - batch.labels[i]);
        for (std::size_t f = 0; f < w.size(); ++f) grad[f] += resid * batch.rows[i][f];
        grad[w.size()] += resid;
    }
    double l1s, l2s;
    penalty_terms(penalty, l1s, l2s);
    if (l1s > 0 || l2s > 0) {
        if (!(C > 0)) throw DataError("penalized gradient needs C > 0");
        for (std::size_t f = 0; f < w.size(); ++f) {
            const double sign = w[f] > 0 ? 1.0 : (w[f] < 0 ? -1.0 : 0.0);
            grad[f] += (l1s * sign + l2s * w[f]) / C;
        }
    }
    return grad;
}

std::shared_ptr<const Model> fit_logistic(const Hypes& h, const Dataset& d, bool lasso) {
    const double C = h.num("C");
    const auto max_iter = static_cast<std::size_t>(h.integer("max_iter"));
    const double tol = h.num("tol");
    const auto cw = class_weights(h.token("class_weight"), d.n_positive(), d.n_negative());
    const Penalty penalty = lasso ? Penalty::L1 : parse_penalty(h.token("penalty"));

    auto model = std::make_shared<LogisticModel>();
    model->solver = lasso ? h.token("solver") : "proximal";

    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    model->w.assign(X.width, 0.0);

    // C = 0 is the infinite-regularization limit of the axis: weights pinned
    // at zero, intercept carries the weighted class prior.
    const bool penalized = penalty != Penalty::None;
    if (penalized && C == 0.0) {
        double wy = 0, wt = 0;
        for (std::size_t i = 0; i < d.n_cases(); ++i) {
            wy += cw[d.outcome(i)] * d.outcome(i);
            wt += cw[d.outcome(i)];
        }
        const double p = wy / wt;
        model->b = std::log(p / (1.0 - p));
        return model;
    }

    double l1s, l2s;
    penalty_terms(penalty, l1s, l2s);
    const double l1_coef = penalized ? l1s / C : 0.0;
    const double l2_coef = penalized ? l2s / C : 0.0;

    // Lipschitz bound for the smooth part via power iteration on the
    // weighted Gram operator (intercept column included).
    const std::size_t dim = X.width + 1;
    std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<double> xv(d.n_cases()), next(dim);
    double lambda_max = 1.0;
    for (int it = 0; it < 30; ++it) {
        for (std::size_t i = 0; i < d.n_cases(); ++i) {
            double s = v[X.width];
            const auto& row = X.rows[i];
            for (std::size_t f = 0; f < X.width; ++f) s += row[f] * v[f];
            xv[i] = cw[d.outcome(i)] * s;
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < d.n_cases(); ++i) {
            const auto& row = X.rows[i];
            for (std::size_t f = 0; f < X.width; ++f) next[f] += row[f] * xv[i];
            next[X.width] += xv[i];
        }
        double norm = 0.0;
        for (double x : next) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        lambda_max = norm;
        for (std::size_t f = 0; f < dim; ++f) v[f] = next[f] / norm;
    }
    const double L = 0.25 * lambda_max * 1.05 + l2_coef;
    const double eta = 1.0 / L;

    LogisticBatch batch{X.rows, d.outcomes()};
    const std::vector<double> no_penalty_cw = cw;
    for (std::size_t it = 0; it < max_iter; ++it) {
        // smooth part: data term + L2; L1 handled by the prox step
        std::vector<double> grad =
            logistic_gradient(model->w, model->b, batch, Penalty::None, 1.0, no_penalty_cw);
        double max_delta = 0.0;
        for (std::size_t f = 0; f < X.width; ++f) {
            const double old = model->w[f];
            double nw = old - eta * (grad[f] + l2_coef * old);
            if (l1_coef > 0) {
                const double t = eta * l1_coef;
                nw = nw > t ? nw - t : (nw < -t ? nw + t : 0.0);
            }
            model->w[f] = nw;
            max_delta = std::max(max_delta, std::abs(nw - old));
        }
        const double nb = model->b - eta * grad[X.width];
        max_delta = std::max(max_delta, std::abs(nb - model->b));
        model->b = nb;
        if (max_delta < tol) break;
    }
    return model;
}

namespace detail {

std::shared_ptr<const Model> logistic_from_json(const json& j) {
    auto m = std::make_shared<LogisticModel>();
    m->w = j.at("w").get<std::vector<double>>();
    m->b = j.at("b").get<double>();
    m->solver = j.at("solver").get<std::string>();
    return m;
}

} // namespace detail

} // namespace rgs
