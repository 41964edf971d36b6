#include "rgs/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "rgs/rng.hpp"
#include "rgs/textio.hpp"

namespace rgs {

using nlohmann::json;

namespace {

const char* kMethodNames[] = {"NB", "LR", "LASSO", "DT", "KNN",
                              "SVC", "RaF", "ADB", "XGB", "DFNN"};

} // namespace

const char* method_name(MethodId m) { return kMethodNames[static_cast<int>(m)]; }

MethodId parse_method(const std::string& token) {
    for (int i = 0; i < 10; ++i)
        if (token == kMethodNames[i]) return static_cast<MethodId>(i);
    std::string msg = "unknown method \"" + token + "\"; valid methods:";
    for (const char* name : kMethodNames) msg += std::string(" ") + name;
    if (token == "SVM") msg += " (did you mean SVC?)";
    if (token == "RF" || token == "RandomForest") msg += " (did you mean RaF?)";
    throw UsageError(msg);
}

std::string Value::repr() const {
    if (kind == Kind::Str) return str;
    if (num == std::floor(num) && std::abs(num) < 1e15) {
        return std::to_string(static_cast<long long>(num));
    }
    return format_double(num);
}

Axis Axis::grid(std::string name, double min, double max, double step) {
    if (!(step > 0)) throw DataError("axis " + name + ": step must be positive");
    if (!(min <= max)) throw DataError("axis " + name + ": min must not exceed max");
    Axis a;
    a.name_ = std::move(name);
    a.kind_ = Kind::Grid;
    a.min_ = min;
    a.max_ = max;
    a.step_ = step;
    return a;
}

Axis Axis::int_range(std::string name, long long min, long long max) {
    if (min > max) throw DataError("axis " + name + ": empty integer range");
    Axis a;
    a.name_ = std::move(name);
    a.kind_ = Kind::IntRange;
    a.imin_ = min;
    a.imax_ = max;
    return a;
}

Axis Axis::explicit_values(std::string name, std::vector<Value> values) {
    if (values.empty()) throw DataError("axis " + name + ": empty value list");
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (values[i] == values[j])
                throw DataError("axis " + name + ": duplicate value " + values[i].repr());
    Axis a;
    a.name_ = std::move(name);
    a.kind_ = Kind::Explicit;
    a.explicit_ = std::move(values);
    return a;
}

std::size_t Axis::count() const {
    switch (kind_) {
        case Kind::Explicit:
            return explicit_.size();
        case Kind::IntRange:
            return static_cast<std::size_t>(imax_ - imin_ + 1);
        case Kind::Grid: {
            // floor((max-min)/step) + 1, treating near-integer ratios as
            // exact so the endpoint survives floating-point division noise
            const double r = (max_ - min_) / step_;
            const double nearest = std::round(r);
            if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, std::abs(nearest)))
                return static_cast<std::size_t>(nearest) + 1;
            return static_cast<std::size_t>(std::floor(r)) + 1;
        }
    }
    return 0;
}

Value Axis::value_at(std::size_t i) const {
    switch (kind_) {
        case Kind::Explicit:
            return explicit_[i];
        case Kind::IntRange:
            return Value(static_cast<double>(imin_ + static_cast<long long>(i)));
        case Kind::Grid:
            return Value(min_ + static_cast<double>(i) * step_);
    }
    return Value(0.0);
}

std::vector<Value> Axis::values() const {
    std::vector<Value> out;
    const std::size_t n = count();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(value_at(i));
    return out;
}

bool Axis::contains(const Value& v) const {
    switch (kind_) {
        case Kind::Explicit:
            return std::find(explicit_.begin(), explicit_.end(), v) != explicit_.end();
        case Kind::IntRange: {
            if (v.kind != Value::Kind::Num) return false;
            if (v.num != std::floor(v.num)) return false;
            const long long i = static_cast<long long>(v.num);
            return i >= imin_ && i <= imax_;
        }
        case Kind::Grid: {
            if (v.kind != Value::Kind::Num) return false;
            const double r = (v.num - min_) / step_;
            const double nearest = std::round(r);
            if (nearest < 0 || nearest > static_cast<double>(count() - 1)) return false;
            return std::abs(v.num - (min_ + nearest * step_)) <= 1e-9 * std::max(1.0, step_);
        }
    }
    return false;
}

HyperparameterSpace::HyperparameterSpace(MethodId method, std::vector<Axis> axes)
    : method_(method), axes_(std::move(axes)) {
    std::set<std::string> names;
    for (const auto& a : axes_)
        if (!names.insert(a.name()).second)
            throw DataError("duplicate axis name: " + a.name());
}

const Axis& HyperparameterSpace::axis(const std::string& name) const {
    for (const auto& a : axes_)
        if (a.name() == name) return a;
    throw DataError("space for " + std::string(method_name(method_)) + " has no axis " + name);
}

bool HyperparameterSpace::has_axis(const std::string& name) const {
    for (const auto& a : axes_)
        if (a.name() == name) return true;
    return false;
}

HyperparameterSpace HyperparameterSpace::load(const std::string& path) {
    json j = json::parse(read_file(path));
    const MethodId method = parse_method(j.at("method").get<std::string>());
    std::vector<Axis> axes;
    for (const auto& ja : j.at("axes")) {
        const std::string name = ja.at("name").get<std::string>();
        const std::string kind = ja.at("kind").get<std::string>();
        if (kind == "grid") {
            axes.push_back(Axis::grid(name, ja.at("min").get<double>(),
                                      ja.at("max").get<double>(), ja.at("step").get<double>()));
        } else if (kind == "int_range") {
            axes.push_back(Axis::int_range(name, ja.at("min").get<long long>(),
                                           ja.at("max").get<long long>()));
        } else if (kind == "values") {
            std::vector<Value> vals;
            for (const auto& jv : ja.at("values")) {
                if (jv.is_string()) vals.push_back(Value(jv.get<std::string>()));
                else vals.push_back(Value(jv.get<double>()));
            }
            axes.push_back(Axis::explicit_values(name, std::move(vals)));
        } else {
            throw DataError("axis " + name + ": unknown kind \"" + kind + "\"");
        }
    }
    return HyperparameterSpace(method, std::move(axes));
}

void HyperparameterSpace::save(const std::string& path) const {
    json j;
    j["method"] = method_name(method_);
    j["axes"] = json::array();
    for (const auto& a : axes_) {
        json ja;
        ja["name"] = a.name();
        switch (a.kind()) {
            case Axis::Kind::Grid:
                ja["kind"] = "grid";
                ja["min"] = a.grid_min();
                ja["max"] = a.grid_max();
                ja["step"] = a.grid_step();
                break;
            case Axis::Kind::IntRange:
                ja["kind"] = "int_range";
                ja["min"] = a.range_min();
                ja["max"] = a.range_max();
                break;
            case Axis::Kind::Explicit:
                ja["kind"] = "values";
                ja["values"] = json::array();
                for (const auto& v : a.explicit_list()) {
                    if (v.kind == Value::Kind::Str) ja["values"].push_back(v.str);
                    else ja["values"].push_back(v.num);
                }
                break;
        }
        j["axes"].push_back(ja);
    }
    write_file(path, j.dump(2) + "\n");
}

double Hypes::num(const std::string& axis) const {
    auto it = values.find(axis);
    if (it == values.end())
        throw DataError(std::string(method_name(method)) + " setting lacks axis " + axis);
    if (it->second.kind != Value::Kind::Num)
        throw DataError("axis " + axis + " holds a token, expected a number");
    return it->second.num;
}

long long Hypes::integer(const std::string& axis) const {
    return static_cast<long long>(std::llround(num(axis)));
}

const std::string& Hypes::token(const std::string& axis) const {
    auto it = values.find(axis);
    if (it == values.end())
        throw DataError(std::string(method_name(method)) + " setting lacks axis " + axis);
    if (it->second.kind != Value::Kind::Str)
        throw DataError("axis " + axis + " holds a number, expected a token");
    return it->second.str;
}

bool Hypes::has(const std::string& axis) const { return values.count(axis) > 0; }

std::vector<std::size_t> axis_counts(const HyperparameterSpace& s) {
    std::vector<std::size_t> counts;
    counts.reserve(s.axes().size());
    for (const auto& a : s.axes()) counts.push_back(a.count());
    return counts;
}

BigUint cardinality(const HyperparameterSpace& s) {
    BigUint product(1);
    for (const auto& a : s.axes()) product.mul(a.count());
    return product;
}

Value sample_axis_value(const Axis& a, Rng& rng) {
    return a.value_at(static_cast<std::size_t>(rng.bounded(a.count())));
}

std::vector<Hypes> sample_hypes(const HyperparameterSpace& s, std::size_t n,
                                std::uint64_t seed) {
    if (n == 0) throw DataError("sample count must be positive");
    if (cardinality(s).less_than(n))
        throw DataError("sample count " + std::to_string(n) +
                        " exceeds pool cardinality " + cardinality(s).str());

    Rng rng(derive_seed(seed, 0x4a3f));
    std::vector<Hypes> out;
    out.reserve(n);
    std::unordered_set<std::string> seen; // per-axis index tuple keys
    while (out.size() < n) {
        std::string key;
        Hypes h;
        h.method = s.method();
        for (const auto& a : s.axes()) {
            const std::size_t idx = static_cast<std::size_t>(rng.bounded(a.count()));
            key += std::to_string(idx) + ",";
            h.values.emplace(a.name(), a.value_at(idx));
        }
        if (seen.insert(key).second) out.push_back(std::move(h));
    }
    return out;
}

void validate_hypes(const HyperparameterSpace& s, const Hypes& h) {
    if (h.method != s.method())
        throw DataError("setting method " + std::string(method_name(h.method)) +
                        " does not match space method " + method_name(s.method()));
    for (const auto& a : s.axes()) {
        auto it = h.values.find(a.name());
        if (it == h.values.end())
            throw DataError("setting lacks axis " + a.name());
        if (!a.contains(it->second))
            throw DataError("value " + it->second.repr() + " not in axis " + a.name());
    }
    for (const auto& [name, value] : h.values) {
        (void)value;
        if (!s.has_axis(name))
            throw DataError("setting has foreign axis " + name);
    }
}

HyperparameterSpace builtin_space(MethodId method, std::size_t n_datapoints) {
    const auto n = static_cast<long long>(n_datapoints);
    const long long half = std::max<long long>(2, n / 2);
    std::vector<Axis> axes;
    switch (method) {
        case MethodId::DFNN:
            axes.push_back(Axis::grid("epochs", 5, 1001, 3));
            axes.push_back(Axis::int_range("batch_size", 1, std::max<long long>(1, n)));
            axes.push_back(Axis::grid("learning_rate", 0.001, 0.3, 0.001));
            axes.push_back(Axis::grid("dropout_rate", 0.0, 0.9, 0.01));
            axes.push_back(Axis::grid("momentum", 0.1, 0.9, 0.01));
            axes.push_back(Axis::grid("decay", 0.0, 0.3, 0.001));
            axes.push_back(Axis::grid("l1_weight", 0.0, 0.3, 0.001));
            axes.push_back(Axis::grid("l2_weight", 0.0, 0.3, 0.001));
            axes.push_back(Axis::explicit_values("n_hidden_layers", {1.0, 2.0, 3.0, 4.0}));
            axes.push_back(Axis::int_range("n_hidden_nodes", 1, std::max<long long>(1, n)));
            axes.push_back(Axis::explicit_values(
                "optimizer", {"SGD", "Adam", "Adagrad", "Nadam", "Adamax"}));
            axes.push_back(Axis::explicit_values(
                "initializer",
                {"Constant", "Glorot_normal", "Glorot_uniform", "He_normal", "He_uniform"}));
            axes.push_back(Axis::explicit_values("input_activation",
                                                 {"Relu", "Sigmoid", "Softmax", "Tanh"}));
            axes.push_back(Axis::explicit_values("hidden_activation",
                                                 {"Relu", "Sigmoid", "Softmax", "Tanh"}));
            break;
        case MethodId::ADB:
            axes.push_back(Axis::int_range("n_estimators", 1, 1001));
            axes.push_back(Axis::grid("learning_rate", 0.001, 0.101, 0.001));
            axes.push_back(Axis::explicit_values("algorithm", {"SAMME"}));
            break;
        case MethodId::NB:
            axes.push_back(Axis::grid("alpha", 0.00001, 100.0, 0.00001));
            axes.push_back(Axis::int_range("min_categories", 5, 16));
            axes.push_back(Axis::explicit_values("fit_prior", {"True", "False"}));
            break;
        case MethodId::DT:
            axes.push_back(Axis::explicit_values("criterion", {"Gini", "Entropy", "Log_loss"}));
            axes.push_back(Axis::explicit_values("splitter", {"Best", "Random"}));
            axes.push_back(Axis::int_range("max_depth", 1, 100));
            axes.push_back(Axis::int_range("min_samples_split", 2, std::max<long long>(2, n)));
            axes.push_back(Axis::int_range("min_samples_leaf", 2, half));
            axes.push_back(Axis::grid("min_weight_fraction_leaf", 0.0, 0.5, 0.001));
            axes.push_back(Axis::int_range("max_features", 1, 17));
            axes.push_back(Axis::int_range("max_leaf_nodes", 2, std::max<long long>(2, n)));
            axes.push_back(Axis::grid("min_impurity_decrease", 0.0, 0.01, 0.001));
            axes.push_back(Axis::explicit_values("class_weight", {"Balanced", "None"}));
            break;
        case MethodId::KNN:
            axes.push_back(Axis::int_range("n_neighbors", 1, 100));
            axes.push_back(Axis::explicit_values("weights", {"Uniform", "Distance", "None"}));
            axes.push_back(
                Axis::explicit_values("algorithm", {"Auto", "Ball_tree", "Kd_tree", "Brute"}));
            axes.push_back(Axis::int_range("leaf_size", 1, std::max<long long>(1, n)));
            break;
        case MethodId::LASSO:
            axes.push_back(Axis::int_range("max_iter", 5, 1000));
            axes.push_back(Axis::grid("tol", 0.00001, 0.01, 0.00005));
            axes.push_back(Axis::grid("C", 0.0, 100.0, 0.00005));
            axes.push_back(Axis::explicit_values("class_weight", {"Balanced", "None"}));
            axes.push_back(Axis::explicit_values("solver", {"Liblinear", "Saga"}));
            break;
        case MethodId::LR:
            axes.push_back(Axis::int_range("max_iter", 5, 1000));
            axes.push_back(Axis::grid("tol", 0.00001, 0.01, 0.00005));
            axes.push_back(Axis::grid("C", 0.0, 100.0, 0.005));
            axes.push_back(Axis::explicit_values("class_weight", {"Balanced", "None"}));
            axes.push_back(
                Axis::explicit_values("penalty", {"None", "L1", "L2", "Elasticnet"}));
            break;
        case MethodId::RaF:
            axes.push_back(Axis::int_range("n_estimators", 1, 1000));
            axes.push_back(Axis::explicit_values("criterion", {"Gini", "Entropy", "Log_loss"}));
            axes.push_back(Axis::int_range("max_depth", 1, 101));
            axes.push_back(Axis::int_range("min_samples_split", 2, std::max<long long>(2, n)));
            axes.push_back(Axis::int_range("min_samples_leaf", 1, half));
            axes.push_back(Axis::grid("min_weight_fraction_leaf", 0.0, 0.5, 0.001));
            axes.push_back(Axis::int_range("max_features", 1, 17));
            axes.push_back(Axis::int_range("max_leaf_nodes", 2, half));
            axes.push_back(Axis::grid("min_impurity_decrease", 0.0, 0.01, 0.001));
            axes.push_back(Axis::explicit_values("class_weight", {"Balanced", "None"}));
            break;
        case MethodId::SVC:
            axes.push_back(Axis::grid("C", 0.0, 100.0, 0.005));
            axes.push_back(Axis::explicit_values("kernel", {"Linear", "Poly", "Rbf", "Sigmoid"}));
            axes.push_back(Axis::int_range("degree", 0, 5));
            axes.push_back(Axis::explicit_values("gamma", {"Scale", "Auto"}));
            axes.push_back(Axis::explicit_values("shrinking", {"True", "False"}));
            axes.push_back(Axis::grid("tol", 0.00001, 0.01, 0.00005));
            axes.push_back(Axis::explicit_values("class_weight", {"Balanced", "None"}));
            axes.push_back(Axis::int_range("max_iter", 5, 1000));
            break;
        case MethodId::XGB:
            axes.push_back(Axis::explicit_values("booster", {"Gbtree", "Gblinear", "Dart"}));
            axes.push_back(Axis::grid("eta", 0.001, 0.1, 0.001));
            axes.push_back(Axis::grid("gamma", 0.0, 10.0, 0.01));
            axes.push_back(Axis::int_range("max_depth", 1, 100));
            axes.push_back(Axis::grid("subsample", 0.01, 1.0, 0.01));
            axes.push_back(
                Axis::explicit_values("sampling_method", {"Uniform", "Gradient_based"}));
            axes.push_back(Axis::grid("alpha", 0.0, 100.0, 0.00001));
            axes.push_back(Axis::grid("lambda", 0.0, 100.0, 0.00001));
            axes.push_back(
                Axis::explicit_values("tree_method", {"Auto", "Exact", "Approx", "Hist"}));
            axes.push_back(Axis::explicit_values("objective", {"Binary:logistic"}));
            break;
    }
    return HyperparameterSpace(method, std::move(axes));
}

} // namespace rgs
