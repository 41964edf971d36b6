#include "rgs/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "rgs/rng.hpp"
#include "rgs/textio.hpp"

namespace rgs {

using nlohmann::json;

std::uint64_t fold_train_seed(std::uint64_t training_seed, std::size_t hypes_index,
                              std::size_t fold) {
    return derive_seed(training_seed, hypes_index, fold);
}

HypesResult evaluate_hypes(MethodId method, const Hypes& h, std::size_t index,
                           const Dataset& train_test, const FoldPlan& folds,
                           std::uint64_t training_seed) {
    HypesResult r;
    r.index = index;
    r.hypes = h;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        for (std::size_t f = 0; f < folds.k; ++f) {
            const Dataset train = train_test.subset_rows(folds.complement_indices(f));
            const Dataset test = train_test.subset_rows(folds.fold_indices(f));
            const TrainedModel model = fit(method, h, train, fold_train_seed(training_seed, index, f));
            for (const auto& w : model.warnings) {
                if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end())
                    r.warnings.push_back(w);
            }
            ScoredSet scored;
            scored.scores.reserve(test.n_cases());
            for (std::size_t i = 0; i < test.n_cases(); ++i)
                scored.scores.push_back(predict_proba(
                    model, encode_row(test.schema(), test.row(i), model.mode)));
            scored.labels.assign(test.outcomes().begin(), test.outcomes().end());
            r.fold_aucs.push_back(auc(scored));
        }
        r.mean_auc = mean_test_auc(r.fold_aucs, folds.k);
    } catch (const std::exception& e) {
        r.failed = true;
        r.failure = e.what();
        r.fold_aucs.clear();
        r.mean_auc = std::nan("");
        r.warnings.push_back("setting " + std::to_string(index) + " failed: " + e.what());
    }
    r.fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::size_t select_best(const std::vector<HypesResult>& results) {
    if (results.empty()) throw DataError("no results to select from");
    std::size_t best = results.size();
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].failed) continue;
        if (best == results.size() || results[i].mean_auc > results[best].mean_auc) best = i;
    }
    if (best == results.size()) throw NumericError("every sampled setting failed to train");
    return best;
}

ValidationOutcome refit_and_validate(MethodId method, const Hypes& best,
                                     const Dataset& train_test, const Dataset& validation,
                                     std::uint64_t seed) {
    if (validation.n_cases() == 0) throw DataError("empty validation set");
    if (validation.n_positive() == 0 || validation.n_negative() == 0)
        throw DataError("validation set holds a single class");
    ValidationOutcome out;
    out.model = fit(method, best, train_test, seed);
    ScoredSet scored;
    scored.scores.reserve(validation.n_cases());
    for (std::size_t i = 0; i < validation.n_cases(); ++i)
        scored.scores.push_back(predict_proba(
            out.model, encode_row(validation.schema(), validation.row(i), out.model.mode)));
    scored.labels.assign(validation.outcomes().begin(), validation.outcomes().end());
    out.roc = roc_curve(scored);
    out.auc = auc(scored);
    return out;
}

SearchReport run_search(const SearchConfig& config, const Dataset& train_test,
                        const Dataset& validation, const FoldPlan& folds) {
    if (config.space.method() != config.method)
        throw DataError("space method does not match search method");
    if (folds.assignment.size() != train_test.n_cases())
        throw DataError("fold plan does not cover the train-test set");
    if (folds.k != config.k)
        throw DataError("fold plan has k=" + std::to_string(folds.k) + ", search wants k=" +
                        std::to_string(config.k));

    const auto t0 = std::chrono::steady_clock::now();
    const auto settings = sample_hypes(config.space, config.n_hypes, config.seeds.sampling);

    SearchReport report;
    report.method = config.method;
    report.label = config.label;
    report.train_test_id = config.train_test_id;
    report.validation_id = config.validation_id;
    report.n_hypes = config.n_hypes;
    report.k = config.k;
    report.seeds = config.seeds;
    report.space_cardinality = cardinality(config.space).str();
    report.results.resize(settings.size());

    // settings are independent; workers pull indices from a shared counter
    // and write into their own slot, so any worker count gives the same
    // report apart from wall-clock fields
    const std::size_t workers = std::max<std::size_t>(1, config.workers);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= settings.size()) break;
            report.results[i] = evaluate_hypes(config.method, settings[i], i, train_test,
                                               folds, config.seeds.training);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    report.best_index = select_best(report.results);
    report.best_mean_auc = report.results[report.best_index].mean_auc;
    double sum = 0.0;
    std::size_t ok = 0;
    for (const auto& r : report.results) {
        if (!r.failed) {
            sum += r.mean_auc;
            ++ok;
        }
    }
    report.avg_mean_auc = ok > 0 ? sum / static_cast<double>(ok) : std::nan("");
    report.models_trained = config.n_hypes * config.k;

    // refit uses a training-seed stream distinct from every fold stream
    auto outcome = refit_and_validate(config.method, settings[report.best_index], train_test,
                                      validation,
                                      fold_train_seed(config.seeds.training,
                                                      report.best_index, config.k));
    report.best_model = std::move(outcome.model);
    report.validation_auc = outcome.auc;
    report.validation_roc = std::move(outcome.roc);

    report.total_minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    return report;
}

std::string SearchReport::results_csv() const {
    std::vector<std::string> axis_names;
    if (!results.empty())
        for (const auto& [name, v] : results.front().hypes.values) {
            (void)v;
            axis_names.push_back(name);
        }
    std::vector<std::string> header = {"index"};
    for (const auto& a : axis_names) header.push_back(a);
    for (std::size_t f = 0; f < k; ++f) header.push_back("auc_fold" + std::to_string(f));
    header.insert(header.end(), {"mean_test_auc", "fit_seconds", "warnings"});
    std::string out = csv_join(header) + "\n";

    for (const auto& r : results) {
        std::vector<std::string> row = {std::to_string(r.index)};
        for (const auto& a : axis_names) row.push_back(r.hypes.values.at(a).repr());
        for (std::size_t f = 0; f < k; ++f)
            row.push_back(r.failed ? "nan" : format_double(r.fold_aucs[f]));
        row.push_back(r.failed ? "nan" : format_double(r.mean_auc));
        row.push_back(format_fixed(r.fit_seconds, 3));
        std::string warn;
        for (const auto& w : r.warnings) {
            if (!warn.empty()) warn += "; ";
            warn += w;
        }
        row.push_back(warn);
        out += csv_join(row) + "\n";
    }
    return out;
}

std::string SearchReport::summary_json(const std::string& results_file,
                                       const std::string& model_file,
                                       const std::string& roc_file) const {
    json j;
    j["method"] = method_name(method);
    j["label"] = label;
    j["train_test"] = train_test_id;
    j["validation"] = validation_id;
    j["n_hypes"] = n_hypes;
    j["k"] = k;
    j["seeds"] = {{"sampling", seeds.sampling},
                  {"folding", seeds.folding},
                  {"training", seeds.training}};
    j["space_cardinality"] = space_cardinality;
    j["best_index"] = best_index;
    json best_values;
    for (const auto& [name, v] : results[best_index].hypes.values) best_values[name] = v.repr();
    j["best_hypes"] = best_values;
    j["best_mean_test_auc"] = best_mean_auc;
    j["avg_mean_test_auc"] = avg_mean_auc;
    j["validation_auc"] = validation_auc;
    j["models_trained"] = models_trained;
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.failed ? 1 : 0;
    j["failed_settings"] = failed;
    j["total_minutes"] = format_fixed(total_minutes, 2);
    j["files"] = {{"results", results_file}, {"model", model_file}, {"roc", roc_file}};
    return j.dump(2) + "\n";
}

SummaryInfo SummaryInfo::load(const std::string& path) {
    json j = json::parse(read_file(path));
    SummaryInfo s;
    s.method = j.at("method").get<std::string>();
    s.label = j.at("label").get<std::string>();
    s.best_mean_auc = j.at("best_mean_test_auc").get<double>();
    s.avg_mean_auc = j.at("avg_mean_test_auc").get<double>();
    s.validation_auc = j.at("validation_auc").get<double>();
    s.roc_file = j.at("files").at("roc").get<std::string>();
    return s;
}

ComparisonRow compare_reports(const SummaryInfo& all_feature, const SummaryInfo& rf) {
    if (all_feature.method != rf.method)
        throw DataError("cannot compare " + all_feature.method + " against " + rf.method);
    if (all_feature.label != rf.label)
        throw DataError("cannot compare label " + all_feature.label + " against " + rf.label);
    ComparisonRow row;
    row.method = all_feature.method;
    row.best_a = all_feature.best_mean_auc;
    row.best_b = rf.best_mean_auc;
    row.best_diff_pct = percent_difference(row.best_a, row.best_b);
    row.avg_a = all_feature.avg_mean_auc;
    row.avg_b = rf.avg_mean_auc;
    row.avg_to_best_a_pct = percent_difference(row.avg_a, row.best_a);
    row.avg_to_best_b_pct = percent_difference(row.avg_b, row.best_b);
    return row;
}

} // namespace rgs
