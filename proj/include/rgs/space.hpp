#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rgs/bigint.hpp"
#include "rgs/errors.hpp"

namespace rgs {

enum class MethodId { NB, LR, LASSO, DT, KNN, SVC, RaF, ADB, XGB, DFNN };

const char* method_name(MethodId m);
MethodId parse_method(const std::string& token); // throws UsageError with suggestions

// One hyperparameter value: either a number or a token.
struct Value {
    enum class Kind { Num, Str } kind = Kind::Num;
    double num = 0.0;
    std::string str;

    Value() = default;
    Value(double v) : kind(Kind::Num), num(v) {}
    Value(const char* s) : kind(Kind::Str), str(s) {}
    Value(std::string s) : kind(Kind::Str), str(std::move(s)) {}

    bool operator==(const Value& o) const {
        if (kind != o.kind) return false;
        return kind == Kind::Num ? num == o.num : str == o.str;
    }
    std::string repr() const;
};

class Axis {
public:
    enum class Kind { Grid, IntRange, Explicit };

    static Axis grid(std::string name, double min, double max, double step);
    static Axis int_range(std::string name, long long min, long long max);
    static Axis explicit_values(std::string name, std::vector<Value> values);

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }

    std::size_t count() const;
    Value value_at(std::size_t i) const;
    std::vector<Value> values() const; // materialized, in order
    bool contains(const Value& v) const;

    double grid_min() const { return min_; }
    double grid_max() const { return max_; }
    double grid_step() const { return step_; }
    long long range_min() const { return imin_; }
    long long range_max() const { return imax_; }
    const std::vector<Value>& explicit_list() const { return explicit_; }

private:
    std::string name_;
    Kind kind_ = Kind::Grid;
    double min_ = 0, max_ = 0, step_ = 1;
    long long imin_ = 0, imax_ = 0;
    std::vector<Value> explicit_;
};

class HyperparameterSpace {
public:
    HyperparameterSpace(MethodId method, std::vector<Axis> axes);

    MethodId method() const { return method_; }
    const std::vector<Axis>& axes() const { return axes_; }
    const Axis& axis(const std::string& name) const;
    bool has_axis(const std::string& name) const;

    static HyperparameterSpace load(const std::string& path);
    void save(const std::string& path) const;

private:
    MethodId method_;
    std::vector<Axis> axes_;
};

// One concrete hyperparameter setting: exactly one value per axis.
struct Hypes {
    MethodId method = MethodId::NB;
    std::map<std::string, Value> values;

    double num(const std::string& axis) const;
    long long integer(const std::string& axis) const;
    const std::string& token(const std::string& axis) const;
    bool has(const std::string& axis) const;
};

// Ordered per-axis value counts and their exact product.
std::vector<std::size_t> axis_counts(const HyperparameterSpace& s);
BigUint cardinality(const HyperparameterSpace& s);

std::vector<Hypes> sample_hypes(const HyperparameterSpace& s, std::size_t n,
                                std::uint64_t seed);

// One unrestricted draw from a single axis (duplicate rejection does not
// apply); used by the uniformity checks.
Value sample_axis_value(const Axis& a, class Rng& rng);

// The ten built-in spaces. Axes whose bounds depend on the dataset size
// (batch size, hidden nodes, min_samples_*) are instantiated from
// n_datapoints at construction time.
HyperparameterSpace builtin_space(MethodId method, std::size_t n_datapoints);

void validate_hypes(const HyperparameterSpace& s, const Hypes& h);

} // namespace rgs
