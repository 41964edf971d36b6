#pragma once

#include <string>
#include <vector>

#include "rgs/errors.hpp"

namespace rgs {

// Declarative plot description; rendering is a pure function of the spec,
// so identical specs produce identical bytes (golden-file friendly).
struct PlotSpec {
    enum class Kind { Roc, RankingBar, ShapBar, ShapSummary };

    struct RocSeries {
        std::string name;
        std::vector<double> fpr;
        std::vector<double> tpr;
        double auc = 0.0;
    };
    struct Bar {
        std::string label;
        double value = 0.0;
    };
    struct SummaryPoint {
        std::size_t feature = 0; // index into summary_features
        double phi = 0.0;
        double raw = 0.0; // normalized category index, colors the point
    };

    Kind kind = Kind::Roc;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<RocSeries> roc_series;
    std::vector<Bar> bars;
    std::vector<std::string> summary_features;
    std::vector<SummaryPoint> summary_points;

    std::string to_json_text() const;
    static PlotSpec from_json_text(const std::string& text);
};

std::string render_plot(const PlotSpec& spec);

} // namespace rgs
