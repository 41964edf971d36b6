#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgs/dataset.hpp"
#include "rgs/space.hpp"

namespace rgs {

// A fitted scorer. score() takes a row encoded in the model's recorded mode
// and returns the positive-class probability. Rows may hold fractional
// values (the explainer composes such rows); every learner accepts them.
class Model {
public:
    virtual ~Model() = default;
    virtual double score(std::span<const double> row) const = 0;
    virtual std::size_t input_width() const = 0;
    virtual const char* kind() const = 0;
    virtual nlohmann::json params_json() const = 0;
};

struct TrainedModel {
    MethodId method = MethodId::NB;
    EncodeMode mode = EncodeMode::OneHot;
    std::shared_ptr<const Model> impl;
    std::vector<std::string> warnings;

    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);
};

// Train `method` with setting `h` on `d`. Deterministic in (h, d, seed).
TrainedModel fit(MethodId method, const Hypes& h, const Dataset& d, std::uint64_t seed);

// Validates dimensions, then scores. Result is in [0,1].
double predict_proba(const TrainedModel& m, std::span<const double> row);

EncodeMode encoding_for(MethodId method);

// Shared helper: per-class loss weights. "Balanced" gives n / (2 * n_c).
std::vector<double> class_weights(const std::string& token, std::size_t n_pos,
                                  std::size_t n_neg);

} // namespace rgs
