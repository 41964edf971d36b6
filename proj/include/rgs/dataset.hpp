#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rgs/errors.hpp"

namespace rgs {

struct Column {
    std::string name;
    std::vector<std::string> categories;
};

// Column vocabularies are closed: categories come from the schema, never
// inferred from data, so a validation set may lack rare categories.
class Schema {
public:
    Schema(std::vector<Column> predictors, std::string outcome_name);

    static Schema load(const std::string& path);
    void save(const std::string& path) const;

    const std::vector<Column>& predictors() const { return predictors_; }
    const std::string& outcome_name() const { return outcome_name_; }
    std::size_t n_predictors() const { return predictors_.size(); }

    // Index into predictors() or throws DataError.
    std::size_t predictor_index(const std::string& name) const;
    bool has_predictor(const std::string& name) const;

    // Index of `token` in column `col`'s vocabulary, or -1.
    int category_index(std::size_t col, const std::string& token) const;

private:
    std::vector<Column> predictors_;
    std::string outcome_name_;
};

class Dataset {
public:
    Dataset(Schema schema, std::vector<std::vector<std::uint8_t>> rows,
            std::vector<std::uint8_t> outcomes);

    const Schema& schema() const { return schema_; }
    std::size_t n_cases() const { return rows_.size(); }
    std::size_t n_positive() const { return n_positive_; }
    std::size_t n_negative() const { return n_cases() - n_positive_; }
    std::size_t n_predictors() const { return schema_.n_predictors(); }

    const std::vector<std::uint8_t>& row(std::size_t i) const { return rows_[i]; }
    std::uint8_t outcome(std::size_t i) const { return outcomes_[i]; }
    const std::vector<std::uint8_t>& outcomes() const { return outcomes_; }

    Dataset subset_rows(const std::vector<std::size_t>& indices) const;

    void save(const std::string& path) const;

private:
    Schema schema_;
    std::vector<std::vector<std::uint8_t>> rows_; // category indices
    std::vector<std::uint8_t> outcomes_;          // 0 = no, 1 = yes
    std::size_t n_positive_ = 0;
};

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignment; // per-case fold id in [0, k)

    static FoldPlan load(const std::string& path);
    void save(const std::string& path) const;

    std::vector<std::size_t> fold_indices(std::size_t fold) const;
    std::vector<std::size_t> complement_indices(std::size_t fold) const;
};

enum class EncodeMode { OneHot, Ordinal };

struct EncodedMatrix {
    EncodeMode mode = EncodeMode::OneHot;
    std::size_t width = 0;
    std::vector<std::vector<double>> rows;
    // one-hot block start per source column; block width = column cardinality
    std::vector<std::size_t> block_start;
    std::vector<std::size_t> block_width;
};

Dataset load_dataset(const std::string& path, const Schema& schema);

std::pair<Dataset, Dataset> stratified_holdout(const Dataset& d, double ratio,
                                               std::uint64_t seed);

FoldPlan make_folds(const Dataset& d, std::size_t k, std::uint64_t seed);

Dataset subset_features(const Dataset& d, const std::vector<std::string>& keep);

EncodedMatrix encode(const Dataset& d, EncodeMode mode);
std::vector<double> encode_row(const Schema& schema, const std::vector<std::uint8_t>& row,
                               EncodeMode mode);
std::size_t encoded_width(const Schema& schema, EncodeMode mode);

// Inverse of encode(d, Ordinal); used by the round-trip check.
Dataset decode_ordinal(const Schema& schema, const EncodedMatrix& m,
                       const std::vector<std::uint8_t>& outcomes);

std::vector<std::string> load_feature_list(const std::string& path);

} // namespace rgs
