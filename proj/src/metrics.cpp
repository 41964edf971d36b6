#include "rgs/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "rgs/textio.hpp"

namespace rgs {

std::size_t ScoredSet::n_positive() const {
    std::size_t p = 0;
    for (auto y : labels) p += y ? 1 : 0;
    return p;
}

std::size_t ScoredSet::n_negative() const { return labels.size() - n_positive(); }

namespace {

void require_both_classes(const ScoredSet& s) {
    if (s.scores.size() != s.labels.size())
        throw DataError("scores and labels differ in length");
    const std::size_t p = s.n_positive();
    if (p == 0 || p == s.labels.size())
        throw DataError("AUC needs at least one case of each class");
}

// Indices sorted by descending score; within a tie group order is irrelevant
// because groups are collapsed.
std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

} // namespace

RocCurve roc_curve(const ScoredSet& s) {
    require_both_classes(s);
    const double P = static_cast<double>(s.n_positive());
    const double N = static_cast<double>(s.n_negative());
    const auto order = descending_order(s.scores);

    RocCurve c;
    c.fpr.push_back(0.0);
    c.tpr.push_back(0.0);
    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double cut = s.scores[order[i]];
        // collapse the tie group at this threshold into one point
        while (i < order.size() && s.scores[order[i]] == cut) {
            if (s.labels[order[i]]) tp += 1;
            else fp += 1;
            ++i;
        }
        c.thresholds.push_back(cut);
        c.fpr.push_back(fp / N);
        c.tpr.push_back(tp / P);
    }
    double area = 0.0;
    for (std::size_t j = 1; j < c.fpr.size(); ++j)
        area += (c.fpr[j] - c.fpr[j - 1]) * (c.tpr[j] + c.tpr[j - 1]) * 0.5;
    c.auc = area;
    return c;
}

double auc(const ScoredSet& s) {
    require_both_classes(s);
    const auto order = descending_order(s.scores);
    const double P = static_cast<double>(s.n_positive());
    const double N = static_cast<double>(s.n_negative());

    // Walk tie groups from the highest score down. A positive in the current
    // group beats every negative with a strictly lower score and half-ties
    // the negatives inside its own group.
    double credit = 0.0;
    double neg_seen = 0.0; // negatives with score above the current group
    std::size_t i = 0;
    while (i < order.size()) {
        const double cut = s.scores[order[i]];
        double pos_g = 0, neg_g = 0;
        while (i < order.size() && s.scores[order[i]] == cut) {
            if (s.labels[order[i]]) pos_g += 1;
            else neg_g += 1;
            ++i;
        }
        credit += pos_g * (N - neg_seen - neg_g) + 0.5 * pos_g * neg_g;
        neg_seen += neg_g;
    }
    return credit / (P * N);
}

double mean_test_auc(std::span<const double> fold_aucs, std::size_t k) {
    if (fold_aucs.size() != k)
        throw DataError("expected " + std::to_string(k) + " fold AUCs, got " +
                        std::to_string(fold_aucs.size()));
    double sum = 0.0;
    for (double v : fold_aucs) sum += v;
    return sum / static_cast<double>(k);
}

double percent_difference(double reference, double value) {
    if (!(reference > 0.0)) throw DataError("percent difference needs a positive reference");
    return (value - reference) / reference * 100.0;
}

std::string RocCurve::to_csv() const {
    std::string out = "threshold,fpr,tpr\n";
    out += "," + format_double(fpr[0]) + "," + format_double(tpr[0]) + "\n";
    for (std::size_t i = 0; i < thresholds.size(); ++i)
        out += format_double(thresholds[i]) + "," + format_double(fpr[i + 1]) + "," +
               format_double(tpr[i + 1]) + "\n";
    out += "# auc," + format_double(auc) + "\n";
    return out;
}

RocCurve RocCurve::from_csv(const std::string& text) {
    RocCurve c;
    std::size_t pos = 0;
    auto header = csv_parse_record(text, pos);
    if (header.size() != 3 || header[0] != "threshold")
        throw DataError("bad ROC file header");
    while (pos < text.size()) {
        if (text[pos] == '\n' || text[pos] == '\r') {
            ++pos;
            continue;
        }
        auto rec = csv_parse_record(text, pos);
        if (!rec.empty() && rec[0] == "# auc") {
            c.auc = std::stod(rec.at(1));
            continue;
        }
        if (rec.size() != 3) throw DataError("bad ROC file row");
        if (!rec[0].empty()) c.thresholds.push_back(std::stod(rec[0]));
        c.fpr.push_back(std::stod(rec[1]));
        c.tpr.push_back(std::stod(rec[2]));
    }
    return c;
}

} // namespace rgs
