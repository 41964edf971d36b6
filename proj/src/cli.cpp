#include "rgs/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rgs/dataset.hpp"
#include "rgs/engine.hpp"
#include "rgs/explain.hpp"
#include "rgs/svg.hpp"
#include "rgs/textio.hpp"

namespace rgs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string basename(const std::string& path) { return fs::path(path).filename().string(); }

Schema load_schema_with_features(const std::string& schema_path,
                                 const std::string& features_path) {
    Schema schema = Schema::load(schema_path);
    if (features_path.empty()) return schema;
    const auto keep = load_feature_list(features_path);
    std::vector<Column> cols;
    for (const auto& col : schema.predictors()) {
        for (const auto& name : keep)
            if (name == col.name) {
                cols.push_back(col);
                break;
            }
    }
    for (const auto& name : keep)
        if (!schema.has_predictor(name)) throw DataError("unknown column: " + name);
    return Schema(std::move(cols), schema.outcome_name());
}

struct SplitArgs {
    std::string data, schema, features, out;
    double ratio = 0.8;
    std::size_t k = 5;
    std::uint64_t seed = 1;
};

int cmd_split(const SplitArgs& a) {
    fs::create_directories(a.out);
    const Schema schema = load_schema_with_features(a.schema, a.features);
    Dataset d = load_dataset(a.data, schema);
    if (!a.features.empty()) {
        // the loader already restricted columns via the reduced schema; keep
        // predictor order from the schema
    }
    auto [train, valid] = stratified_holdout(d, a.ratio, a.seed);
    const FoldPlan folds = make_folds(train, a.k, a.seed);

    train.save((fs::path(a.out) / "train_test.csv").string());
    valid.save((fs::path(a.out) / "validation.csv").string());
    folds.save((fs::path(a.out) / "folds.csv").string());

    std::cout << "total: " << d.n_cases() << " cases (" << d.n_positive() << " positive, "
              << d.n_negative() << " negative)\n";
    std::cout << "train-test: " << train.n_cases() << " cases (" << train.n_positive()
              << " positive, " << train.n_negative() << " negative)\n";
    std::cout << "validation: " << valid.n_cases() << " cases (" << valid.n_positive()
              << " positive, " << valid.n_negative() << " negative)\n";
    std::cout << "folds: " << folds.k << "\n";
    return 0;
}

struct SearchArgs {
    std::string method, train, validation, schema, features, space, folds_file, out;
    std::string label = "default";
    std::string name; // display name; defaults to the method token
    std::size_t n_hypes = 10;
    std::size_t k = 5;
    std::uint64_t seed_sample = 1, seed_fold = 2, seed_train = 3;
    std::size_t workers = 1;
};

int cmd_search(const SearchArgs& a) {
    fs::create_directories(a.out);
    const Schema schema = load_schema_with_features(a.schema, a.features);
    const Dataset train = load_dataset(a.train, schema);
    const Dataset valid = load_dataset(a.validation, schema);

    SearchConfig config{
        parse_method(a.method),
        a.space.empty() ? builtin_space(parse_method(a.method), train.n_cases())
                        : HyperparameterSpace::load(a.space),
        a.n_hypes,
        a.k,
        SearchSeeds{a.seed_sample, a.seed_fold, a.seed_train},
        basename(a.train),
        basename(a.validation),
        a.label,
        a.workers,
    };
    FoldPlan folds = a.folds_file.empty() ? make_folds(train, a.k, a.seed_fold)
                                          : FoldPlan::load(a.folds_file);

    SearchReport report = run_search(config, train, valid, folds);

    const fs::path out(a.out);
    write_file((out / "results.csv").string(), report.results_csv());
    report.best_model.save((out / "model.json").string());
    write_file((out / "roc.csv").string(), report.validation_roc.to_csv());

    const std::string display = a.name.empty() ? a.method : a.name;
    json summary = json::parse(
        report.summary_json("results.csv", "model.json", "roc.csv"));
    summary["name"] = display;
    write_file((out / "summary.json").string(), summary.dump(2) + "\n");

    // config echo: no absolute paths or worker counts, so reruns anywhere
    // with any parallelism emit identical bytes
    json echo;
    echo["command"] = "search";
    echo["method"] = a.method;
    echo["name"] = display;
    echo["label"] = a.label;
    echo["n_hypes"] = a.n_hypes;
    echo["k"] = a.k;
    echo["seeds"] = {{"sampling", a.seed_sample},
                     {"folding", a.seed_fold},
                     {"training", a.seed_train}};
    echo["train"] = basename(a.train);
    echo["validation"] = basename(a.validation);
    echo["space"] = a.space.empty() ? std::string("builtin") : basename(a.space);
    write_file((out / "config.json").string(), echo.dump(2) + "\n");

    PlotSpec roc;
    roc.kind = PlotSpec::Kind::Roc;
    roc.title = display + " validation ROC";
    PlotSpec::RocSeries series;
    series.name = display;
    series.fpr = report.validation_roc.fpr;
    series.tpr = report.validation_roc.tpr;
    series.auc = report.validation_auc;
    roc.roc_series.push_back(std::move(series));
    write_file((out / "roc.svg").string(), render_plot(roc));

    std::size_t failed = 0;
    for (const auto& r : report.results) failed += r.failed ? 1 : 0;
    std::cout << "evaluated " << report.n_hypes << " settings (" << report.models_trained
              << " models, " << failed << " failed)\n";
    std::cout << "best index " << report.best_index << ", mean-test AUC "
              << format_fixed(report.best_mean_auc, 3) << ", validation AUC "
              << format_fixed(report.validation_auc, 3) << "\n";
    std::cout << "total minutes " << format_fixed(report.total_minutes, 2) << "\n";
    return 0;
}

struct ReportArgs {
    std::vector<std::string> summaries;
    std::string out;
};

int cmd_report(const ReportArgs& a) {
    fs::create_directories(a.out);
    struct Entry {
        SummaryInfo info;
        std::string name;
        fs::path dir;
    };
    std::vector<Entry> entries;
    for (const auto& path : a.summaries) {
        Entry e;
        e.info = SummaryInfo::load(path);
        json j = json::parse(read_file(path));
        e.name = j.value("name", e.info.method);
        e.dir = fs::path(path).parent_path();
        entries.push_back(std::move(e));
    }
    for (const auto& e : entries)
        if (e.info.label != entries.front().info.label)
            throw DataError("summaries carry different labels: " + entries.front().info.label +
                            " vs " + e.info.label);

    // model table, one row per summary
    std::string table = "name\tmethod\tbest mean-test AUC\tavg mean-test AUC\tvalidation AUC\n";
    for (const auto& e : entries)
        table += e.name + "\t" + e.info.method + "\t" + format_fixed(e.info.best_mean_auc, 3) +
                 "\t" + format_fixed(e.info.avg_mean_auc, 3) + "\t" +
                 format_fixed(e.info.validation_auc, 3) + "\n";

    // side-by-side rows for consecutive same-method pairs (reference first)
    std::string pairs;
    for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
        if (entries[i].info.method != entries[i + 1].info.method) continue;
        const ComparisonRow row = compare_reports(entries[i].info, entries[i + 1].info);
        pairs += row.method + "\t" + format_fixed(row.best_a, 3) + "\t" +
                 format_fixed(row.best_b, 3) + "\t" + format_fixed(row.best_diff_pct, 2) +
                 "%\t" + format_fixed(row.avg_a, 3) + "\t" +
                 format_fixed(row.avg_to_best_a_pct, 1) + "%\t" + format_fixed(row.avg_b, 3) +
                 "\t" + format_fixed(row.avg_to_best_b_pct, 1) + "%\n";
        ++i;
    }
    std::string out_text = table;
    if (!pairs.empty()) {
        out_text +=
            "\nmethod\tbest\tbest (subset)\t% difference\tavg\tavg-to-best %\tavg (subset)\t"
            "avg-to-best (subset) %\n";
        out_text += pairs;
    }
    write_file((fs::path(a.out) / "comparison.tsv").string(), out_text);
    std::cout << out_text;

    // ranking bars, descending by best mean-test AUC
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return entries[x].info.best_mean_auc > entries[y].info.best_mean_auc;
    });
    PlotSpec ranking;
    ranking.kind = PlotSpec::Kind::RankingBar;
    ranking.title = "Model ranking by mean-test AUC (" + entries.front().info.label + ")";
    for (std::size_t i : order)
        ranking.bars.push_back({entries[i].name, entries[i].info.best_mean_auc});
    write_file((fs::path(a.out) / "ranking.json").string(), ranking.to_json_text());
    write_file((fs::path(a.out) / "ranking.svg").string(), render_plot(ranking));

    // ROC panel across all summaries
    PlotSpec panel;
    panel.kind = PlotSpec::Kind::Roc;
    panel.title = "Validation ROC curves (" + entries.front().info.label + ")";
    for (const auto& e : entries) {
        const RocCurve curve = RocCurve::from_csv(read_file((e.dir / e.info.roc_file).string()));
        PlotSpec::RocSeries s;
        s.name = e.name;
        s.fpr = curve.fpr;
        s.tpr = curve.tpr;
        s.auc = curve.auc;
        panel.roc_series.push_back(std::move(s));
    }
    write_file((fs::path(a.out) / "roc_panel.json").string(), panel.to_json_text());
    write_file((fs::path(a.out) / "roc_panel.svg").string(), render_plot(panel));
    return 0;
}

struct ExplainArgs {
    std::string model, train, validation, schema, features, out;
    std::size_t clusters = 10;
    std::string mode = "auto"; // auto | exact | sampled
    std::size_t permutations = 2000;
    std::size_t exact_limit = 12;
    std::size_t max_cases = 0; // 0 = all
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

int cmd_explain(const ExplainArgs& a) {
    fs::create_directories(a.out);
    const Schema schema = load_schema_with_features(a.schema, a.features);
    const Dataset train = load_dataset(a.train, schema);
    Dataset cases = load_dataset(a.validation, schema);
    if (a.max_cases > 0 && a.max_cases < cases.n_cases()) {
        std::vector<std::size_t> head(a.max_cases);
        for (std::size_t i = 0; i < a.max_cases; ++i) head[i] = i;
        cases = cases.subset_rows(head);
    }
    const TrainedModel model = TrainedModel::load(a.model);

    std::size_t exact_limit = a.exact_limit;
    if (a.mode == "exact") exact_limit = 20;
    else if (a.mode == "sampled") exact_limit = 0;
    else if (a.mode != "auto") throw UsageError("mode must be auto, exact, or sampled");

    const ShapValues values = explain_dataset(model, train, cases, a.clusters, a.permutations,
                                              exact_limit, a.seed, a.workers);

    // raw values normalized per column for the summary colors
    std::vector<std::vector<double>> raw(cases.n_cases());
    for (std::size_t i = 0; i < cases.n_cases(); ++i) {
        raw[i].resize(schema.n_predictors());
        for (std::size_t f = 0; f < schema.n_predictors(); ++f) {
            const double card = static_cast<double>(schema.predictors()[f].categories.size());
            raw[i][f] = card > 1 ? cases.row(i)[f] / (card - 1.0) : 0.5;
        }
    }

    std::string csv = "case,feature,phi,raw_category\n";
    for (std::size_t i = 0; i < values.phi.size(); ++i)
        for (std::size_t f = 0; f < values.phi[i].size(); ++f)
            csv += std::to_string(i) + "," + csv_quote(values.feature_names[f]) + "," +
                   format_double(values.phi[i][f]) + "," +
                   csv_quote(schema.predictors()[f].categories[cases.row(i)[f]]) + "\n";
    csv += "# base_value," + format_double(values.base_value) + "\n";
    csv += "# mode," + values.mode + "\n";
    write_file((fs::path(a.out) / "shap_values.csv").string(), csv);

    const ShapAggregate agg = aggregate(values, raw);
    PlotSpec bar;
    bar.kind = PlotSpec::Kind::ShapBar;
    bar.title = "Mean absolute SHAP value by feature";
    for (std::size_t f : agg.bar_order)
        bar.bars.push_back({values.feature_names[f], agg.bar_values[f]});
    write_file((fs::path(a.out) / "shap_bar.json").string(), bar.to_json_text());
    write_file((fs::path(a.out) / "shap_bar.svg").string(), render_plot(bar));

    PlotSpec summary;
    summary.kind = PlotSpec::Kind::ShapSummary;
    summary.title = "SHAP value distribution by feature";
    std::vector<std::size_t> row_of(values.feature_names.size());
    for (std::size_t pos = 0; pos < agg.bar_order.size(); ++pos) {
        summary.summary_features.push_back(values.feature_names[agg.bar_order[pos]]);
        row_of[agg.bar_order[pos]] = pos;
    }
    for (const auto& p : agg.points)
        summary.summary_points.push_back({row_of[p.feature], p.phi, p.raw});
    write_file((fs::path(a.out) / "shap_summary.json").string(), summary.to_json_text());
    write_file((fs::path(a.out) / "shap_summary.svg").string(), render_plot(summary));

    std::cout << "explained " << values.phi.size() << " cases in " << values.mode
              << " mode; base value " << format_fixed(values.base_value, 4) << "\n";
    return 0;
}

struct RenderArgs {
    std::string spec, out;
};

int cmd_render(const RenderArgs& a) {
    const PlotSpec spec = PlotSpec::from_json_text(read_file(a.spec));
    write_file(a.out, render_plot(spec));
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"randomized hyperparameter grid search for categorical classification"};
    app.require_subcommand(1);
    app.set_config("--config");

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "stratified 80/20 holdout plus CV fold plan");
    split->add_option("--data", split_args.data, "dataset CSV")->required();
    split->add_option("--schema", split_args.schema, "schema JSON")->required();
    split->add_option("--features", split_args.features, "keep only these columns (one per line)");
    split->add_option("--ratio", split_args.ratio, "train-test fraction");
    split->add_option("--k", split_args.k, "fold count");
    split->add_option("--seed", split_args.seed, "split seed");
    split->add_option("--out", split_args.out, "output directory")->required();

    SearchArgs search_args;
    auto* search = app.add_subcommand("search", "randomized grid search with k-fold CV");
    search->add_option("--method", search_args.method, "NB LR LASSO DT KNN SVC RaF ADB XGB DFNN")
        ->required();
    search->add_option("--train", search_args.train, "train-test CSV")->required();
    search->add_option("--validation", search_args.validation, "validation CSV")->required();
    search->add_option("--schema", search_args.schema, "schema JSON")->required();
    search->add_option("--features", search_args.features, "feature list file");
    search->add_option("--space", search_args.space, "space JSON (default: built-in)");
    search->add_option("--folds", search_args.folds_file, "fold plan from split");
    search->add_option("--label", search_args.label, "horizon label for report grouping");
    search->add_option("--name", search_args.name, "display name for plots");
    search->add_option("--n-hypes", search_args.n_hypes, "number of sampled settings");
    search->add_option("--k", search_args.k, "fold count");
    search->add_option("--seed-sample", search_args.seed_sample, "sampling seed");
    search->add_option("--seed-fold", search_args.seed_fold, "folding seed");
    search->add_option("--seed-train", search_args.seed_train, "training seed");
    search->add_option("--workers", search_args.workers, "parallel evaluators");
    search->add_option("--out", search_args.out, "output directory")->required();

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "comparison table, ranking bars, ROC panel");
    report->add_option("--summary", report_args.summaries, "summary.json (repeatable)")
        ->required();
    report->add_option("--out", report_args.out, "output directory")->required();

    ExplainArgs explain_args;
    auto* explain = app.add_subcommand("explain", "Shapley explanations for a trained model");
    explain->add_option("--model", explain_args.model, "model.json from search")->required();
    explain->add_option("--train", explain_args.train, "train-test CSV (background source)")
        ->required();
    explain->add_option("--validation", explain_args.validation, "cases to explain")
        ->required();
    explain->add_option("--schema", explain_args.schema, "schema JSON")->required();
    explain->add_option("--features", explain_args.features, "feature list file");
    explain->add_option("--clusters", explain_args.clusters, "k-means cluster count");
    explain->add_option("--mode", explain_args.mode, "auto, exact, or sampled");
    explain->add_option("--permutations", explain_args.permutations, "sampled-mode draws");
    explain->add_option("--exact-limit", explain_args.exact_limit,
                        "auto mode switches to sampled above this many features");
    explain->add_option("--max-cases", explain_args.max_cases, "explain only the first N cases");
    explain->add_option("--seed", explain_args.seed, "explainer seed");
    explain->add_option("--workers", explain_args.workers, "parallel case explainers");
    explain->add_option("--out", explain_args.out, "output directory")->required();

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "render a plot spec to SVG");
    render->add_option("--spec", render_args.spec, "plot spec JSON")->required();
    render->add_option("--out", render_args.out, "output SVG path")->required();

    std::vector<const char*> argv;
    argv.push_back("rgs");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (split->parsed()) return cmd_split(split_args);
        if (search->parsed()) return cmd_search(search_args);
        if (report->parsed()) return cmd_report(report_args);
        if (explain->parsed()) return cmd_explain(explain_args);
        if (render->parsed()) return cmd_render(render_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << "[E2] " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "[E2] " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "[E3] " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "[E4] " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "[E3] " << e.what() << "\n";
        return 3;
    }
}

} // namespace rgs::cli
