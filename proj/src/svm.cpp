#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_factories.hpp"
#include "rgs/learners.hpp"
#include "rgs/rng.hpp"

namespace rgs {

using nlohmann::json;

KernelKind parse_kernel(const std::string& token) {
    if (token == "Linear") return KernelKind::Linear;
    if (token == "Poly") return KernelKind::Poly;
    if (token == "Rbf") return KernelKind::Rbf;
    if (token == "Sigmoid") return KernelKind::Sigmoid;
    throw DataError("unknown kernel token: " + token);
}

double kernel_eval(KernelKind kind, std::span<const double> x, std::span<const double> z,
                   double gamma, int degree, double coef0) {
    if (x.size() != z.size()) throw DataError("kernel arguments differ in length");
    switch (kind) {
        case KernelKind::Linear: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
            return dot;
        }
        case KernelKind::Poly: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
            return std::pow(gamma * dot + coef0, degree);
        }
        case KernelKind::Rbf: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - z[i];
                d2 += diff * diff;
            }
            return std::exp(-gamma * d2);
        }
        case KernelKind::Sigmoid: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
            return std::tanh(gamma * dot + coef0);
        }
    }
    return 0.0;
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

class SvmModel : public Model {
public:
    KernelKind kernel_kind = KernelKind::Linear;
    double gamma = 1.0;
    int degree = 3;
    double coef0 = 0.0;
    double scale = 1.0; // 1/(lambda * T) factor of the final iterate
    std::vector<std::vector<double>> support;
    std::vector<double> coef; // beta_j * y_j per support vector
    double platt_a = 1.0, platt_b = 0.0;
    std::size_t width = 0;

    double decision(std::span<const double> row) const {
        double f = 0.0;
        for (std::size_t j = 0; j < support.size(); ++j)
            f += coef[j] * kernel_eval(kernel_kind, support[j], row, gamma, degree, coef0);
        return scale * f;
    }
    double score(std::span<const double> row) const override {
        if (row.size() != width) throw DataError("row width does not match SVM input");
        return sigmoid(platt_a * decision(row) + platt_b);
    }
    std::size_t input_width() const override { return width; }
    const char* kind() const override { return "svm"; }
    json params_json() const override {
        json j;
        j["kernel"] = static_cast<int>(kernel_kind);
        j["gamma"] = gamma;
        j["degree"] = degree;
        j["coef0"] = coef0;
        j["scale"] = scale;
        j["support"] = support;
        j["coef"] = coef;
        j["platt_a"] = platt_a;
        j["platt_b"] = platt_b;
        j["width"] = width;
        return j;
    }
};

// Platt-style logistic calibration of decision values, 50 Newton steps.
// The slope is kept positive so the probability stays a strictly
// increasing function of the decision value.
void fit_platt(const std::vector<double>& dec, std::span<const std::uint8_t> y, double& A,
               double& B) {
    A = 1.0;
    B = 0.0;
    for (int it = 0; it < 50; ++it) {
        double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
        for (std::size_t i = 0; i < dec.size(); ++i) {
            const double p = sigmoid(A * dec[i] + B);
            const double r = p - y[i];
            const double h = std::max(p * (1.0 - p), 1e-12);
            ga += r * dec[i];
            gb += r;
            haa += h * dec[i] * dec[i];
            hab += h * dec[i];
            hbb += h;
        }
        const double det = haa * hbb - hab * hab;
        double da, db;
        if (std::abs(det) > 1e-12) {
            da = (hbb * ga - hab * gb) / det;
            db = (haa * gb - hab * ga) / det;
        } else {
            da = ga / std::max(haa, 1e-12);
            db = gb / std::max(hbb, 1e-12);
        }
        A -= da;
        B -= db;
        A = std::max(A, 1e-6);
        if (std::abs(da) + std::abs(db) < 1e-10) break;
    }
}

} // namespace

std::shared_ptr<const Model> fit_svm(const Hypes& h, const Dataset& d, std::uint64_t seed) {
    const double C = h.num("C");
    const auto max_iter = static_cast<std::size_t>(h.integer("max_iter"));
    const auto cw = class_weights(h.token("class_weight"), d.n_positive(), d.n_negative());
    // shrinking and tol tune the reference solver's inner loop only;
    // recorded in the setting, no effect on this trainer

    const EncodedMatrix X = encode(d, EncodeMode::OneHot);
    const std::size_t n = d.n_cases();

    auto model = std::make_shared<SvmModel>();
    model->kernel_kind = parse_kernel(h.token("kernel"));
    model->degree = static_cast<int>(h.integer("degree"));
    model->coef0 = 0.0;
    model->width = X.width;

    const std::string gamma_token = h.token("gamma");
    if (gamma_token == "Auto") {
        model->gamma = 1.0 / static_cast<double>(X.width);
    } else if (gamma_token == "Scale") {
        double mean = 0.0, sq = 0.0;
        const double count = static_cast<double>(n * X.width);
        for (const auto& row : X.rows)
            for (double v : row) {
                mean += v;
                sq += v * v;
            }
        mean /= count;
        const double var = sq / count - mean * mean;
        model->gamma = var > 0 ? 1.0 / (static_cast<double>(X.width) * var)
                               : 1.0 / static_cast<double>(X.width);
    } else {
        throw DataError("unknown gamma token: " + gamma_token);
    }

    if (C == 0.0) {
        // infinite-regularization limit: the decision value is identically 0
        model->scale = 0.0;
        model->platt_a = 1.0;
        model->platt_b = 0.0;
        return model;
    }

    // kernel Pegasos on the weighted hinge loss, lambda = 1/(C n)
    const double lambda = 1.0 / (C * static_cast<double>(n));
    std::vector<double> beta(n, 0.0);   // update accumulators
    std::vector<double> fcache(n, 0.0); // sum_j beta_j y_j K(x_j, x_i)
    std::vector<double> ylab(n);
    for (std::size_t i = 0; i < n; ++i) ylab[i] = d.outcome(i) ? 1.0 : -1.0;

    Rng rng(derive_seed(seed, 0x5e6a));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < max_iter; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            ++t;
            const double f = fcache[i] / (lambda * static_cast<double>(t));
            if (ylab[i] * f < 1.0) {
                const double c = cw[d.outcome(i)];
                beta[i] += c;
                const double add = c * ylab[i];
                for (std::size_t jj = 0; jj < n; ++jj)
                    fcache[jj] += add * kernel_eval(model->kernel_kind, X.rows[i], X.rows[jj],
                                                    model->gamma, model->degree, model->coef0);
            }
        }
    }
    model->scale = 1.0 / (lambda * static_cast<double>(std::max<std::size_t>(t, 1)));
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] != 0.0) {
            model->support.push_back(X.rows[i]);
            model->coef.push_back(beta[i] * ylab[i]);
        }
    }

    std::vector<double> dec(n);
    for (std::size_t i = 0; i < n; ++i) dec[i] = model->decision(X.rows[i]);
    fit_platt(dec, d.outcomes(), model->platt_a, model->platt_b);
    return model;
}

namespace detail {

std::shared_ptr<const Model> svm_from_json(const json& j) {
    auto m = std::make_shared<SvmModel>();
    m->kernel_kind = static_cast<KernelKind>(j.at("kernel").get<int>());
    m->gamma = j.at("gamma").get<double>();
    m->degree = j.at("degree").get<int>();
    m->coef0 = j.at("coef0").get<double>();
    m->scale = j.at("scale").get<double>();
    m->support = j.at("support").get<std::vector<std::vector<double>>>();
    m->coef = j.at("coef").get<std::vector<double>>();
    m->platt_a = j.at("platt_a").get<double>();
    m->platt_b = j.at("platt_b").get<double>();
    m->width = j.at("width").get<std::size_t>();
    return m;
}

} // namespace detail

} // namespace rgs
