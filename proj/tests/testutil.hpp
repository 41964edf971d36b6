#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/metrics.hpp"
#include "rgs/rng.hpp"

namespace testutil {

// Brute-force Mann-Whitney AUC: every positive-negative pair, ties half.
inline double pair_count_auc(const std::vector<double>& scores,
                             const std::vector<std::uint8_t>& labels) {
    double credit = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) credit += 1.0;
            else if (scores[i] == scores[j]) credit += 0.5;
        }
    }
    return credit / static_cast<double>(pairs);
}

// Planted-signal generator: categorical table with `n_informative` columns
// whose category distributions differ between classes strongly enough that
// the Bayes-optimal AUC clears 0.9. Noise columns are uniform and
// class-independent.
struct SyntheticSpec {
    std::size_t n_cases = 2000;
    std::size_t n_predictors = 12;
    std::size_t n_informative = 3;
    double positive_rate = 0.35;
    std::uint64_t seed = 42;
};

inline rgs::Dataset make_synthetic(const SyntheticSpec& spec) {
    using namespace rgs;
    // informative columns: 3 categories with mirrored class profiles
    const double pos_profile[3] = {0.70, 0.20, 0.10};
    const double neg_profile[3] = {0.10, 0.20, 0.70};

    std::vector<Column> cols;
    for (std::size_t c = 0; c < spec.n_predictors; ++c) {
        Column col;
        col.name = (c < spec.n_informative ? "signal_" : "noise_") + std::to_string(c);
        const std::size_t cards = c < spec.n_informative ? 3 : 3 + c % 3;
        for (std::size_t v = 0; v < cards; ++v) col.categories.push_back("c" + std::to_string(v));
        cols.push_back(std::move(col));
    }
    Schema schema(std::move(cols), "outcome");

    Rng rng(derive_seed(spec.seed, 0x5e7a));
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<std::uint8_t> outcomes;
    for (std::size_t i = 0; i < spec.n_cases; ++i) {
        const std::uint8_t y = rng.real01() < spec.positive_rate ? 1 : 0;
        std::vector<std::uint8_t> row(spec.n_predictors);
        for (std::size_t c = 0; c < spec.n_predictors; ++c) {
            const std::size_t cards = schema.predictors()[c].categories.size();
            if (c < spec.n_informative) {
                const double* profile = y ? pos_profile : neg_profile;
                double u = rng.real01();
                std::size_t v = 0;
                while (v + 1 < cards && u >= profile[v]) {
                    u -= profile[v];
                    ++v;
                }
                row[c] = static_cast<std::uint8_t>(v);
            } else {
                row[c] = static_cast<std::uint8_t>(rng.bounded(cards));
            }
        }
        rows.push_back(std::move(row));
        outcomes.push_back(y);
    }
    return Dataset(schema, std::move(rows), std::move(outcomes));
}

// Exact Bayes-optimal AUC of the generator above: enumerate the joint
// distribution of the informative columns for each class and pair them.
inline double synthetic_bayes_auc(std::size_t n_informative) {
    const double pos_profile[3] = {0.70, 0.20, 0.10};
    const double neg_profile[3] = {0.10, 0.20, 0.70};
    const std::size_t combos = static_cast<std::size_t>(std::pow(3.0, n_informative));
    std::vector<double> ppos(combos, 1.0), pneg(combos, 1.0), llr(combos);
    for (std::size_t m = 0; m < combos; ++m) {
        std::size_t rest = m;
        for (std::size_t c = 0; c < n_informative; ++c) {
            const std::size_t v = rest % 3;
            rest /= 3;
            ppos[m] *= pos_profile[v];
            pneg[m] *= neg_profile[v];
        }
        llr[m] = std::log(ppos[m] / pneg[m]);
    }
    double credit = 0.0;
    for (std::size_t a = 0; a < combos; ++a)
        for (std::size_t b = 0; b < combos; ++b) {
            if (llr[a] > llr[b]) credit += ppos[a] * pneg[b];
            else if (llr[a] == llr[b]) credit += 0.5 * ppos[a] * pneg[b];
        }
    return credit;
}

// Small hand-buildable dataset helper.
inline rgs::Dataset tiny_dataset(const std::vector<rgs::Column>& cols,
                                 const std::vector<std::vector<std::uint8_t>>& rows,
                                 const std::vector<std::uint8_t>& outcomes) {
    return rgs::Dataset(rgs::Schema(cols, "outcome"), rows, outcomes);
}

// Fresh scratch directory under the build tree.
inline std::string scratch_dir(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("rgs_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

} // namespace testutil
