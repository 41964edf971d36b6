#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/metrics.hpp"
#include "rgs/model.hpp"
#include "rgs/space.hpp"

namespace rgs {

struct SearchSeeds {
    std::uint64_t sampling = 1;
    std::uint64_t folding = 2;
    std::uint64_t training = 3;
};

struct SearchConfig {
    MethodId method = MethodId::NB;
    HyperparameterSpace space;
    std::size_t n_hypes = 1;
    std::size_t k = 5;
    SearchSeeds seeds;
    std::string train_test_id;  // dataset identifiers echoed into reports
    std::string validation_id;
    std::string label; // horizon label; reports may only be compared within one
    std::size_t workers = 1;
};

struct HypesResult {
    std::size_t index = 0;
    Hypes hypes;
    bool failed = false;
    std::string failure;
    std::vector<double> fold_aucs;
    double mean_auc = 0.0;
    double fit_seconds = 0.0;
    std::vector<std::string> warnings;
};

struct SearchReport {
    MethodId method = MethodId::NB;
    std::string label;
    std::string train_test_id;
    std::string validation_id;
    std::size_t n_hypes = 0;
    std::size_t k = 0;
    SearchSeeds seeds;
    std::string space_cardinality;
    std::vector<HypesResult> results;
    std::size_t best_index = 0;
    double best_mean_auc = 0.0;
    double avg_mean_auc = 0.0; // average of all successful mean-test AUCs
    TrainedModel best_model;
    double validation_auc = 0.0;
    RocCurve validation_roc;
    double total_minutes = 0.0;
    std::size_t models_trained = 0;

    std::string results_csv() const;
    // summary without result rows; file names are relative to the run dir
    std::string summary_json(const std::string& results_file, const std::string& model_file,
                             const std::string& roc_file) const;
};

// Lightweight view of a written summary, as consumed by report comparison.
struct SummaryInfo {
    std::string method;
    std::string label;
    double best_mean_auc = 0.0;
    double avg_mean_auc = 0.0;
    double validation_auc = 0.0;
    std::string roc_file; // relative to the summary's directory
    static SummaryInfo load(const std::string& path);
};

// Per-setting training seed: hash of (training seed, setting index, fold).
std::uint64_t fold_train_seed(std::uint64_t training_seed, std::size_t hypes_index,
                              std::size_t fold);

HypesResult evaluate_hypes(MethodId method, const Hypes& h, std::size_t index,
                           const Dataset& train_test, const FoldPlan& folds,
                           std::uint64_t training_seed);

SearchReport run_search(const SearchConfig& config, const Dataset& train_test,
                        const Dataset& validation, const FoldPlan& folds);

std::size_t select_best(const std::vector<HypesResult>& results);

struct ValidationOutcome {
    TrainedModel model;
    double auc = 0.0;
    RocCurve roc;
};

ValidationOutcome refit_and_validate(MethodId method, const Hypes& best,
                                     const Dataset& train_test, const Dataset& validation,
                                     std::uint64_t seed);

struct ComparisonRow {
    std::string method;
    double best_a = 0.0;         // reference (all-feature) best mean-test AUC
    double best_b = 0.0;         // comparison (risk-factor subset) best
    double best_diff_pct = 0.0;  // percent_difference(best_a, best_b)
    double avg_a = 0.0, avg_b = 0.0;
    double avg_to_best_a_pct = 0.0; // average vs best, per report
    double avg_to_best_b_pct = 0.0;
};

ComparisonRow compare_reports(const SummaryInfo& all_feature, const SummaryInfo& rf);

} // namespace rgs
