#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rgs/errors.hpp"

namespace rgs {

struct ScoredSet {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;

    std::size_t n_positive() const;
    std::size_t n_negative() const;
};

struct RocCurve {
    std::vector<double> fpr;        // non-decreasing, starts 0 ends 1
    std::vector<double> tpr;        // non-decreasing, starts 0 ends 1
    std::vector<double> thresholds; // descending cutoffs, one per point past (0,0)
    double auc = 0.0;               // trapezoidal area

    std::string to_csv() const;
    static RocCurve from_csv(const std::string& text);
};

RocCurve roc_curve(const ScoredSet& s);

// Mann-Whitney value: (concordant + 0.5*tied) / (P*N).
double auc(const ScoredSet& s);

double mean_test_auc(std::span<const double> fold_aucs, std::size_t k);

// (value - reference) / reference * 100
double percent_difference(double reference, double value);

} // namespace rgs
