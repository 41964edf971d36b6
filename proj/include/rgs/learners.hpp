#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/model.hpp"

namespace rgs {

// ---- standalone formula kernels (unit-testable pieces) ----

// (count + alpha) / (class_total + alpha * n_categories)
double nb_class_conditional(double count, double class_total, double alpha,
                            std::size_t n_categories);

enum class Criterion { Gini, Entropy, LogLoss };
Criterion parse_criterion(const std::string& token);

// Impurity of a weighted binary node given (weight_pos, weight_neg).
double impurity(double weight_pos, double weight_neg, Criterion c);

// Gradient of the weighted logistic negative log-likelihood plus a
// (1/C)-scaled penalty subgradient. Returns {d/dw..., d/db}.
enum class Penalty { None, L1, L2, Elasticnet };
Penalty parse_penalty(const std::string& token);

struct LogisticBatch {
    std::span<const std::vector<double>> rows;
    std::span<const std::uint8_t> labels;
};

std::vector<double> logistic_gradient(std::span<const double> w, double b,
                                      const LogisticBatch& batch, Penalty penalty, double C,
                                      std::span<const double> class_w);

// Loss the gradient above differentiates; used by the finite-difference check.
double logistic_loss(std::span<const double> w, double b, const LogisticBatch& batch,
                     Penalty penalty, double C, std::span<const double> class_w);

// ln((1-err)/err) + ln(n_classes-1); throws NumericError when the stage must
// be rejected (err >= 1 - 1/K); err <= 0 returns the cap ln(1e12).
double adaboost_stage_weight(double err, std::size_t n_classes);

enum class KernelKind { Linear, Poly, Rbf, Sigmoid };
KernelKind parse_kernel(const std::string& token);
double kernel_eval(KernelKind kind, std::span<const double> x, std::span<const double> z,
                   double gamma, int degree, double coef0);

// -soft_threshold(G, alpha) / (H + lambda)
double xgb_leaf_weight(double G, double H, double lambda, double alpha);

enum class KnnWeights { Uniform, Distance };
double knn_score(std::span<const std::uint8_t> neighbor_labels,
                 std::span<const double> neighbor_distances, KnnWeights weights);

// ---- trainers (one per family); each returns the method's Model ----

std::shared_ptr<const Model> fit_naive_bayes(const Hypes& h, const Dataset& d);
std::shared_ptr<const Model> fit_logistic(const Hypes& h, const Dataset& d, bool lasso);
std::shared_ptr<const Model> fit_decision_tree(const Hypes& h, const Dataset& d,
                                               std::uint64_t seed);
std::shared_ptr<const Model> fit_random_forest(const Hypes& h, const Dataset& d,
                                               std::uint64_t seed, bool bootstrap = true);
std::shared_ptr<const Model> fit_adaboost(const Hypes& h, const Dataset& d);
std::shared_ptr<const Model> fit_xgboost(const Hypes& h, const Dataset& d, std::uint64_t seed,
                                         std::vector<std::string>& warnings);
std::shared_ptr<const Model> fit_svm(const Hypes& h, const Dataset& d, std::uint64_t seed);
std::shared_ptr<const Model> fit_knn(const Hypes& h, const Dataset& d,
                                     std::vector<std::string>& warnings);

std::shared_ptr<const Model> model_from_json(const std::string& kind,
                                             const nlohmann::json& params);

} // namespace rgs
