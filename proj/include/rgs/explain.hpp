#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/model.hpp"

namespace rgs {

struct Centroids {
    std::size_t k = 0;
    std::vector<std::vector<double>> vectors;
    double inertia = 0.0;
};

// Background row: coordinate-wise mean of the k centroids.
using BackgroundVector = std::vector<double>;

struct ShapValues {
    std::vector<std::vector<double>> phi; // [case][feature]
    double base_value = 0.0;              // model score on the background row
    std::vector<std::string> feature_names;
    std::string mode; // "exact" or "sampled(n)"
};

struct ShapAggregate {
    // bar: features sorted descending by mean |phi|
    std::vector<std::size_t> bar_order;
    std::vector<double> bar_values;
    // summary points for the beeswarm: (feature, phi, normalized raw index)
    struct Point {
        std::size_t feature;
        double phi;
        double raw; // category index normalized to [0,1]
    };
    std::vector<Point> points;
};

Centroids kmeans(const EncodedMatrix& m, std::size_t k, std::uint64_t seed);

BackgroundVector background(const Centroids& c);

// Copy the one-hot blocks of features in `subset` (plus `include_i` when
// >= 0) from `case_row`; all other blocks come from the background. A
// feature is a source column: its whole block moves together.
std::vector<double> synthetic_sample(std::span<const double> case_row,
                                     const BackgroundVector& bg,
                                     const EncodedMatrix& layout,
                                     const std::set<std::size_t>& subset, int include_i);

std::vector<double> shap_exact(const Model& model, std::span<const double> case_row,
                               const BackgroundVector& bg, const EncodedMatrix& layout);

std::vector<double> shap_sampled(const Model& model, std::span<const double> case_row,
                                 const BackgroundVector& bg, const EncodedMatrix& layout,
                                 std::size_t n_permutations, std::uint64_t seed);

// Shared estimator core: average marginal contributions along the given
// feature orderings. shap_sampled draws random orderings; tests may pass
// the full set of distinct permutations to reproduce the exact value.
std::vector<double> shap_from_permutations(const Model& model,
                                           std::span<const double> case_row,
                                           const BackgroundVector& bg,
                                           const EncodedMatrix& layout,
                                           std::span<const std::vector<std::size_t>> perms);

ShapAggregate aggregate(const ShapValues& values,
                        const std::vector<std::vector<double>>& raw_normalized);

// mode: exact when n_features <= exact_limit, else sampled.
ShapValues explain_dataset(const TrainedModel& model, const Dataset& train_reference,
                           const Dataset& cases, std::size_t k_clusters,
                           std::size_t n_permutations, std::size_t exact_limit,
                           std::uint64_t seed, std::size_t workers = 1);

} // namespace rgs
