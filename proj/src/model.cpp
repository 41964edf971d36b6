#include "rgs/model.hpp"

#include <cmath>

#include "model_factories.hpp"
#include "rgs/dfnn.hpp"
#include "rgs/learners.hpp"
#include "rgs/textio.hpp"

namespace rgs {

using nlohmann::json;

EncodeMode encoding_for(MethodId method) {
    return method == MethodId::NB ? EncodeMode::Ordinal : EncodeMode::OneHot;
}

std::vector<double> class_weights(const std::string& token, std::size_t n_pos,
                                  std::size_t n_neg) {
    if (token == "Balanced") {
        const double n = static_cast<double>(n_pos + n_neg);
        return {n / (2.0 * static_cast<double>(n_neg)), n / (2.0 * static_cast<double>(n_pos))};
    }
    if (token == "None") return {1.0, 1.0};
    throw DataError("unknown class_weight token: " + token);
}

namespace {

const std::vector<std::string>& required_axes(MethodId m) {
    static const std::vector<std::string> nb = {"alpha", "min_categories", "fit_prior"};
    static const std::vector<std::string> lr = {"max_iter", "tol", "C", "class_weight",
                                                "penalty"};
    static const std::vector<std::string> lasso = {"max_iter", "tol", "C", "class_weight",
                                                   "solver"};
    static const std::vector<std::string> dt = {
        "criterion",     "splitter",     "max_depth",
        "min_samples_split", "min_samples_leaf", "min_weight_fraction_leaf",
        "max_features",  "max_leaf_nodes", "min_impurity_decrease",
        "class_weight"};
    static const std::vector<std::string> knn = {"n_neighbors", "weights", "algorithm",
                                                 "leaf_size"};
    static const std::vector<std::string> svc = {"C",   "kernel",       "degree", "gamma",
                                                 "shrinking", "tol", "class_weight",
                                                 "max_iter"};
    static const std::vector<std::string> raf = {
        "n_estimators",  "criterion",    "max_depth",
        "min_samples_split", "min_samples_leaf", "min_weight_fraction_leaf",
        "max_features",  "max_leaf_nodes", "min_impurity_decrease",
        "class_weight"};
    static const std::vector<std::string> adb = {"n_estimators", "learning_rate", "algorithm"};
    static const std::vector<std::string> xgb = {
        "booster", "eta",   "gamma",  "max_depth",   "subsample",
        "sampling_method", "alpha", "lambda", "tree_method", "objective"};
    static const std::vector<std::string> dfnn = {
        "epochs",        "batch_size",  "learning_rate", "dropout_rate", "momentum",
        "decay",         "l1_weight",   "l2_weight",     "n_hidden_layers",
        "n_hidden_nodes", "optimizer",  "initializer",   "input_activation",
        "hidden_activation"};
    switch (m) {
        case MethodId::NB: return nb;
        case MethodId::LR: return lr;
        case MethodId::LASSO: return lasso;
        case MethodId::DT: return dt;
        case MethodId::KNN: return knn;
        case MethodId::SVC: return svc;
        case MethodId::RaF: return raf;
        case MethodId::ADB: return adb;
        case MethodId::XGB: return xgb;
        case MethodId::DFNN: return dfnn;
    }
    return nb;
}

void check_axes(MethodId method, const Hypes& h) {
    const auto& required = required_axes(method);
    for (const auto& name : required)
        if (!h.has(name))
            throw DataError(std::string(method_name(method)) + " setting lacks axis " + name);
    for (const auto& [name, value] : h.values) {
        (void)value;
        bool known = false;
        for (const auto& r : required)
            if (r == name) known = true;
        if (!known)
            throw DataError(std::string(method_name(method)) + " setting has foreign axis " +
                            name);
    }
}

} // namespace

TrainedModel fit(MethodId method, const Hypes& h, const Dataset& d, std::uint64_t seed) {
    if (h.method != method)
        throw DataError("setting is for " + std::string(method_name(h.method)) + ", not " +
                        method_name(method));
    if (d.n_cases() == 0) throw DataError("empty training data");
    if (d.n_positive() == 0 || d.n_negative() == 0)
        throw DataError("training data holds a single class");
    check_axes(method, h);

    TrainedModel m;
    m.method = method;
    m.mode = encoding_for(method);
    switch (method) {
        case MethodId::NB:
            m.impl = fit_naive_bayes(h, d);
            break;
        case MethodId::LR:
            m.impl = fit_logistic(h, d, /*lasso=*/false);
            break;
        case MethodId::LASSO:
            m.impl = fit_logistic(h, d, /*lasso=*/true);
            break;
        case MethodId::DT:
            m.impl = fit_decision_tree(h, d, seed);
            break;
        case MethodId::KNN:
            m.impl = fit_knn(h, d, m.warnings);
            break;
        case MethodId::SVC:
            m.impl = fit_svm(h, d, seed);
            break;
        case MethodId::RaF:
            m.impl = fit_random_forest(h, d, seed);
            break;
        case MethodId::ADB:
            m.impl = fit_adaboost(h, d);
            break;
        case MethodId::XGB:
            m.impl = fit_xgboost(h, d, seed, m.warnings);
            break;
        case MethodId::DFNN:
            m.impl = fit_dfnn(h, d, seed);
            break;
    }
    return m;
}

double predict_proba(const TrainedModel& m, std::span<const double> row) {
    if (row.size() != m.impl->input_width()) {
        // categorical NB also accepts its ordinal width
        bool ok = false;
        if (m.method == MethodId::NB) ok = true; // NB validates internally
        if (!ok)
            throw DataError("row width " + std::to_string(row.size()) + " does not match model input width " +
                            std::to_string(m.impl->input_width()));
    }
    const double p = m.impl->score(row);
    if (!(p >= 0.0 && p <= 1.0))
        throw NumericError("model produced a probability outside [0,1]");
    return p;
}

void TrainedModel::save(const std::string& path) const {
    json j;
    j["format_version"] = 1;
    j["method"] = method_name(method);
    j["encoding"] = mode == EncodeMode::Ordinal ? "ordinal" : "one-hot";
    j["warnings"] = warnings;
    j["kind"] = impl->kind();
    j["params"] = impl->params_json();
    write_file(path, j.dump() + "\n");
}

TrainedModel TrainedModel::load(const std::string& path) {
    json j = json::parse(read_file(path));
    if (j.at("format_version").get<int>() != 1)
        throw DataError("unsupported model format version in " + path);
    TrainedModel m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.mode = j.at("encoding").get<std::string>() == "ordinal" ? EncodeMode::Ordinal
                                                              : EncodeMode::OneHot;
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    const std::string kind = j.at("kind").get<std::string>();
    const json& params = j.at("params");
    using namespace detail;
    if (kind == "naive_bayes") m.impl = nb_from_json(params);
    else if (kind == "logistic") m.impl = logistic_from_json(params);
    else if (kind == "decision_tree") m.impl = tree_from_json(params);
    else if (kind == "random_forest") m.impl = forest_from_json(params);
    else if (kind == "adaboost") m.impl = adaboost_from_json(params);
    else if (kind == "gbtree") m.impl = gbtree_from_json(params);
    else if (kind == "gblinear") m.impl = gblinear_from_json(params);
    else if (kind == "svm") m.impl = svm_from_json(params);
    else if (kind == "knn") m.impl = knn_from_json(params);
    else if (kind == "dfnn") m.impl = dfnn_from_json(params);
    else throw DataError("unknown model kind: " + kind);
    return m;
}

} // namespace rgs
