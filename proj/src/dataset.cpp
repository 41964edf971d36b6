#include "rgs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rgs/rng.hpp"
#include "rgs/textio.hpp"

namespace rgs {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << content;
}

Schema::Schema(std::vector<Column> predictors, std::string outcome_name)
    : predictors_(std::move(predictors)), outcome_name_(std::move(outcome_name)) {
    std::set<std::string> seen;
    for (const auto& col : predictors_) {
        if (!seen.insert(col.name).second)
            throw DataError("duplicate column name: " + col.name);
        if (col.categories.size() < 2)
            throw DataError("column " + col.name + " must have at least 2 categories");
        std::set<std::string> cats(col.categories.begin(), col.categories.end());
        if (cats.size() != col.categories.size())
            throw DataError("column " + col.name + " has duplicate categories");
    }
    if (outcome_name_.empty()) throw DataError("schema lacks an outcome column");
    if (seen.count(outcome_name_))
        throw DataError("outcome column " + outcome_name_ + " also listed as predictor");
}

Schema Schema::load(const std::string& path) {
    json j = json::parse(read_file(path));
    std::vector<Column> cols;
    for (const auto& jc : j.at("columns")) {
        Column c;
        c.name = jc.at("name").get<std::string>();
        for (const auto& cat : jc.at("categories"))
            c.categories.push_back(cat.get<std::string>());
        cols.push_back(std::move(c));
    }
    return Schema(std::move(cols), j.at("outcome").get<std::string>());
}

void Schema::save(const std::string& path) const {
    json j;
    j["outcome"] = outcome_name_;
    j["columns"] = json::array();
    for (const auto& col : predictors_) {
        json jc;
        jc["name"] = col.name;
        jc["categories"] = col.categories;
        j["columns"].push_back(jc);
    }
    write_file(path, j.dump(2) + "\n");
}

std::size_t Schema::predictor_index(const std::string& name) const {
    for (std::size_t i = 0; i < predictors_.size(); ++i)
        if (predictors_[i].name == name) return i;
    throw DataError("unknown column: " + name);
}

bool Schema::has_predictor(const std::string& name) const {
    for (const auto& col : predictors_)
        if (col.name == name) return true;
    return false;
}

int Schema::category_index(std::size_t col, const std::string& token) const {
    const auto& cats = predictors_[col].categories;
    for (std::size_t i = 0; i < cats.size(); ++i)
        if (cats[i] == token) return static_cast<int>(i);
    return -1;
}

Dataset::Dataset(Schema schema, std::vector<std::vector<std::uint8_t>> rows,
                 std::vector<std::uint8_t> outcomes)
    : schema_(std::move(schema)), rows_(std::move(rows)), outcomes_(std::move(outcomes)) {
    if (rows_.size() != outcomes_.size())
        throw DataError("row/outcome count mismatch");
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != schema_.n_predictors())
            throw DataError("row " + std::to_string(r) + " has wrong width");
        for (std::size_t c = 0; c < rows_[r].size(); ++c) {
            if (rows_[r][c] >= schema_.predictors()[c].categories.size())
                throw DataError("row " + std::to_string(r) + " column " +
                                schema_.predictors()[c].name + ": index out of range");
        }
        n_positive_ += outcomes_[r] ? 1 : 0;
    }
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& indices) const {
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<std::uint8_t> outs;
    rows.reserve(indices.size());
    outs.reserve(indices.size());
    for (std::size_t i : indices) {
        rows.push_back(rows_[i]);
        outs.push_back(outcomes_[i]);
    }
    return Dataset(schema_, std::move(rows), std::move(outs));
}

void Dataset::save(const std::string& path) const {
    std::string out;
    std::vector<std::string> header;
    for (const auto& col : schema_.predictors()) header.push_back(col.name);
    header.push_back(schema_.outcome_name());
    out += csv_join(header) + "\n";
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        std::vector<std::string> fields;
        for (std::size_t c = 0; c < rows_[r].size(); ++c)
            fields.push_back(schema_.predictors()[c].categories[rows_[r][c]]);
        fields.push_back(outcomes_[r] ? "yes" : "no");
        out += csv_join(fields) + "\n";
    }
    write_file(path, out);
}

Dataset load_dataset(const std::string& path, const Schema& schema) {
    const std::string text = read_file(path);
    if (text.empty()) throw DataError("empty file: " + path);

    std::size_t pos = 0;
    const auto header = csv_parse_record(text, pos);

    // Header is order-insensitive; map file columns onto schema slots.
    std::vector<int> col_map(header.size(), -1); // file col -> predictor index
    int outcome_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == schema.outcome_name()) {
            if (outcome_col >= 0) throw DataError("outcome column appears twice");
            outcome_col = static_cast<int>(i);
        } else if (schema.has_predictor(header[i])) {
            col_map[i] = static_cast<int>(schema.predictor_index(header[i]));
        }
        // extra columns not in the schema are ignored
    }
    if (outcome_col < 0)
        throw DataError("missing column: " + schema.outcome_name());
    std::vector<bool> found(schema.n_predictors(), false);
    for (int m : col_map)
        if (m >= 0) found[m] = true;
    for (std::size_t c = 0; c < found.size(); ++c)
        if (!found[c])
            throw DataError("missing column: " + schema.predictors()[c].name);

    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<std::uint8_t> outcomes;
    std::size_t row_idx = 0;
    while (pos < text.size()) {
        // skip trailing blank line
        if (text[pos] == '\n' || text[pos] == '\r') {
            ++pos;
            continue;
        }
        const auto rec = csv_parse_record(text, pos);
        if (rec.size() != header.size())
            throw DataError("row " + std::to_string(row_idx) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(rec.size()));
        std::vector<std::uint8_t> row(schema.n_predictors(), 0);
        for (std::size_t i = 0; i < rec.size(); ++i) {
            if (static_cast<int>(i) == outcome_col) {
                if (rec[i] == "yes") outcomes.push_back(1);
                else if (rec[i] == "no") outcomes.push_back(0);
                else
                    throw DataError("unknown category token \"" + rec[i] + "\" in column " +
                                    schema.outcome_name() + " at row " + std::to_string(row_idx));
            } else if (col_map[i] >= 0) {
                const std::size_t c = static_cast<std::size_t>(col_map[i]);
                const int idx = schema.category_index(c, rec[i]);
                if (idx < 0)
                    throw DataError("unknown category token \"" + rec[i] + "\" in column " +
                                    schema.predictors()[c].name + " at row " +
                                    std::to_string(row_idx));
                row[c] = static_cast<std::uint8_t>(idx);
            }
        }
        rows.push_back(std::move(row));
        ++row_idx;
    }
    if (rows.empty()) throw DataError("no data rows in file: " + path);
    return Dataset(schema, std::move(rows), std::move(outcomes));
}

namespace {

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

} // namespace

std::pair<Dataset, Dataset> stratified_holdout(const Dataset& d, double ratio,
                                               std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw DataError("holdout ratio must be in (0,1)");
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < d.n_cases(); ++i)
        (d.outcome(i) ? pos_idx : neg_idx).push_back(i);
    if (pos_idx.size() < 2 || neg_idx.size() < 2)
        throw DataError("each class needs at least 2 cases to split");

    Rng rng(derive_seed(seed, 0x5b1d));
    std::vector<std::size_t> train, valid;
    for (auto* cls : {&pos_idx, &neg_idx}) {
        rng.shuffle(*cls);
        const std::size_t take = round_half_up(ratio * static_cast<double>(cls->size()));
        for (std::size_t i = 0; i < cls->size(); ++i)
            (i < take ? train : valid).push_back((*cls)[i]);
    }
    // keep the original row order in both halves
    std::sort(train.begin(), train.end());
    std::sort(valid.begin(), valid.end());
    return {d.subset_rows(train), d.subset_rows(valid)};
}

FoldPlan make_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw DataError("fold count must be at least 2");
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < d.n_cases(); ++i)
        (d.outcome(i) ? pos_idx : neg_idx).push_back(i);
    if (pos_idx.size() < k || neg_idx.size() < k)
        throw DataError("fold count " + std::to_string(k) + " exceeds a class count");

    FoldPlan plan;
    plan.k = k;
    plan.assignment.assign(d.n_cases(), 0);
    Rng rng(derive_seed(seed, 0xf01d));
    for (auto* cls : {&pos_idx, &neg_idx}) {
        rng.shuffle(*cls);
        // quota per fold; remainder spread one-per-fold starting at fold 0
        const std::size_t q = cls->size() / k;
        const std::size_t r = cls->size() % k;
        std::size_t at = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const std::size_t quota = q + (f < r ? 1 : 0);
            for (std::size_t j = 0; j < quota; ++j)
                plan.assignment[(*cls)[at++]] = f;
        }
    }
    return plan;
}

std::vector<std::size_t> FoldPlan::fold_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

FoldPlan FoldPlan::load(const std::string& path) {
    const std::string text = read_file(path);
    FoldPlan plan;
    std::size_t pos = 0;
    const auto header = csv_parse_record(text, pos);
    if (header.size() != 2 || header[0] != "case" || header[1] != "fold")
        throw DataError("bad fold plan header in " + path);
    while (pos < text.size()) {
        if (text[pos] == '\n' || text[pos] == '\r') {
            ++pos;
            continue;
        }
        const auto rec = csv_parse_record(text, pos);
        if (rec.size() != 2) throw DataError("bad fold plan row in " + path);
        const std::size_t idx = std::stoul(rec[0]);
        const std::size_t fold = std::stoul(rec[1]);
        if (idx != plan.assignment.size()) throw DataError("fold plan rows out of order");
        plan.assignment.push_back(fold);
        plan.k = std::max(plan.k, fold + 1);
    }
    return plan;
}

void FoldPlan::save(const std::string& path) const {
    std::string out = "case,fold\n";
    for (std::size_t i = 0; i < assignment.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(assignment[i]) + "\n";
    write_file(path, out);
}

Dataset subset_features(const Dataset& d, const std::vector<std::string>& keep) {
    if (keep.empty()) throw DataError("empty feature list");
    std::set<std::string> keep_set;
    for (const auto& name : keep) {
        if (name == d.schema().outcome_name())
            throw DataError("outcome column " + name + " cannot appear in a feature list");
        d.schema().predictor_index(name); // throws on unknown
        keep_set.insert(name);
    }
    std::vector<std::size_t> cols;
    std::vector<Column> new_cols;
    for (std::size_t c = 0; c < d.schema().n_predictors(); ++c) {
        if (keep_set.count(d.schema().predictors()[c].name)) {
            cols.push_back(c);
            new_cols.push_back(d.schema().predictors()[c]);
        }
    }
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(d.n_cases());
    for (std::size_t r = 0; r < d.n_cases(); ++r) {
        std::vector<std::uint8_t> row;
        row.reserve(cols.size());
        for (std::size_t c : cols) row.push_back(d.row(r)[c]);
        rows.push_back(std::move(row));
    }
    return Dataset(Schema(std::move(new_cols), d.schema().outcome_name()), std::move(rows),
                   d.outcomes());
}

std::size_t encoded_width(const Schema& schema, EncodeMode mode) {
    if (mode == EncodeMode::Ordinal) return schema.n_predictors();
    std::size_t w = 0;
    for (const auto& col : schema.predictors()) w += col.categories.size();
    return w;
}

std::vector<double> encode_row(const Schema& schema, const std::vector<std::uint8_t>& row,
                               EncodeMode mode) {
    if (mode == EncodeMode::Ordinal) {
        std::vector<double> out(row.size());
        for (std::size_t c = 0; c < row.size(); ++c) out[c] = static_cast<double>(row[c]);
        return out;
    }
    std::vector<double> out(encoded_width(schema, mode), 0.0);
    std::size_t at = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
        out[at + row[c]] = 1.0;
        at += schema.predictors()[c].categories.size();
    }
    return out;
}

EncodedMatrix encode(const Dataset& d, EncodeMode mode) {
    EncodedMatrix m;
    m.mode = mode;
    m.width = encoded_width(d.schema(), mode);
    std::size_t at = 0;
    for (const auto& col : d.schema().predictors()) {
        m.block_start.push_back(mode == EncodeMode::Ordinal ? m.block_start.size() : at);
        m.block_width.push_back(mode == EncodeMode::Ordinal ? 1 : col.categories.size());
        at += col.categories.size();
    }
    m.rows.reserve(d.n_cases());
    for (std::size_t r = 0; r < d.n_cases(); ++r)
        m.rows.push_back(encode_row(d.schema(), d.row(r), mode));
    return m;
}

Dataset decode_ordinal(const Schema& schema, const EncodedMatrix& m,
                       const std::vector<std::uint8_t>& outcomes) {
    if (m.mode != EncodeMode::Ordinal) throw DataError("decode expects ordinal encoding");
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(m.rows.size());
    for (const auto& enc : m.rows) {
        std::vector<std::uint8_t> row(enc.size());
        for (std::size_t c = 0; c < enc.size(); ++c)
            row[c] = static_cast<std::uint8_t>(enc[c]);
        rows.push_back(std::move(row));
    }
    return Dataset(schema, std::move(rows), outcomes);
}

std::vector<std::string> load_feature_list(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<std::string> names;
    std::string cur;
    for (char c : text) {
        if (c == '\n' || c == '\r') {
            if (!cur.empty()) names.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) names.push_back(cur);
    if (names.empty()) throw DataError("empty feature list: " + path);
    return names;
}

} // namespace rgs
