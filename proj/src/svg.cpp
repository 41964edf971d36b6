#include "rgs/svg.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rgs/textio.hpp"

namespace rgs {

using nlohmann::json;

namespace {

constexpr double kWidth = 800, kHeight = 520;
constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 70;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) { return format_fixed(v, 2); }

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string text_el(double x, double y, const std::string& s, const std::string& attrs = "") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" " +
           attrs + ">" + xml_escape(s) + "</text>\n";
}

std::string open_svg(const std::string& title) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
           "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
           num(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += text_el(kWidth / 2, 28, title, "font-size=\"16\" text-anchor=\"middle\"");
    return out;
}

std::string axis_frame(const std::string& x_label, const std::string& y_label) {
    std::string out;
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) +
           "\" height=\"" + num(kPlotH) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += text_el(kLeft + kPlotW / 2, kHeight - 12, x_label,
                   "font-size=\"13\" text-anchor=\"middle\"");
    out += "<g transform=\"translate(18," + num(kTop + kPlotH / 2) + ") rotate(-90)\">" +
           text_el(0, 0, y_label, "font-size=\"13\" text-anchor=\"middle\"") + "</g>\n";
    return out;
}

// unit square [0,1]^2 mapped into the plot frame
double ux(double v) { return kLeft + v * kPlotW; }
double uy(double v) { return kTop + (1.0 - v) * kPlotH; }

std::string unit_ticks() {
    std::string out;
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        out += "<line x1=\"" + num(ux(v)) + "\" y1=\"" + num(kTop + kPlotH) + "\" x2=\"" +
               num(ux(v)) + "\" y2=\"" + num(kTop + kPlotH + 5) + "\" stroke=\"black\"/>\n";
        out += text_el(ux(v), kTop + kPlotH + 20, format_fixed(v, 1),
                       "font-size=\"11\" text-anchor=\"middle\"");
        out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(uy(v)) + "\" x2=\"" +
               num(kLeft) + "\" y2=\"" + num(uy(v)) + "\" stroke=\"black\"/>\n";
        out += text_el(kLeft - 10, uy(v) + 4, format_fixed(v, 1),
                       "font-size=\"11\" text-anchor=\"end\"");
    }
    return out;
}

std::string render_roc(const PlotSpec& spec) {
    std::string out = open_svg(spec.title);
    out += axis_frame(spec.x_label.empty() ? "False positive rate" : spec.x_label,
                      spec.y_label.empty() ? "True positive rate" : spec.y_label);
    out += unit_ticks();
    out += "<line x1=\"" + num(ux(0)) + "\" y1=\"" + num(uy(0)) + "\" x2=\"" + num(ux(1)) +
           "\" y2=\"" + num(uy(1)) + "\" stroke=\"#aaaaaa\" stroke-dasharray=\"4,4\"/>\n";
    for (std::size_t s = 0; s < spec.roc_series.size(); ++s) {
        const auto& series = spec.roc_series[s];
        const char* color = kPalette[s % 10];
        std::string points;
        for (std::size_t i = 0; i < series.fpr.size(); ++i) {
            if (i > 0) points += " ";
            points += num(ux(series.fpr[i])) + "," + num(uy(series.tpr[i]));
        }
        out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        const double ly = kTop + 16 + 16 * static_cast<double>(s);
        out += "<line x1=\"" + num(kLeft + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
               num(kLeft + 34) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        std::string label = series.name.empty() ? "" : series.name + " ";
        label += "AUC = " + format_fixed(series.auc, 3);
        out += text_el(kLeft + 40, ly, label, "font-size=\"12\"");
    }
    out += "</svg>\n";
    return out;
}

std::string render_bars_vertical(const PlotSpec& spec) {
    std::string out = open_svg(spec.title);
    double vmax = 0.0;
    for (const auto& b : spec.bars) vmax = std::max(vmax, b.value);
    if (vmax <= 0.0) vmax = 1.0;
    out += axis_frame(spec.x_label, spec.y_label.empty() ? "mean-test AUC" : spec.y_label);
    const double n = static_cast<double>(spec.bars.size());
    const double slot = kPlotW / n;
    const double bw = slot * 0.7;
    for (std::size_t i = 0; i < spec.bars.size(); ++i) {
        const auto& b = spec.bars[i];
        const double h = b.value / vmax * (kPlotH - 20);
        const double x = kLeft + slot * static_cast<double>(i) + (slot - bw) / 2;
        const double y = kTop + kPlotH - h;
        out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(bw) +
               "\" height=\"" + num(h) + "\" fill=\"" + kPalette[i % 10] + "\"/>\n";
        out += text_el(x + bw / 2, y - 4, format_fixed(b.value, 3),
                       "font-size=\"10\" text-anchor=\"middle\"");
        out += "<g transform=\"translate(" + num(x + bw / 2) + "," + num(kTop + kPlotH + 14) +
               ") rotate(-40)\">" +
               text_el(0, 0, b.label, "font-size=\"10\" text-anchor=\"end\"") + "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string render_bars_horizontal(const PlotSpec& spec) {
    std::string out = open_svg(spec.title);
    double vmax = 0.0;
    for (const auto& b : spec.bars) vmax = std::max(vmax, b.value);
    if (vmax <= 0.0) vmax = 1.0;
    out += axis_frame(spec.x_label.empty() ? "mean |SHAP value|" : spec.x_label, spec.y_label);
    const double n = static_cast<double>(spec.bars.size());
    const double slot = kPlotH / n;
    const double bh = slot * 0.65;
    for (std::size_t i = 0; i < spec.bars.size(); ++i) {
        const auto& b = spec.bars[i];
        const double w = b.value / vmax * (kPlotW - 80);
        const double y = kTop + slot * static_cast<double>(i) + (slot - bh) / 2;
        out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
               "\" height=\"" + num(bh) + "\" fill=\"#1f77b4\"/>\n";
        out += text_el(kLeft - 8, y + bh / 2 + 4, b.label,
                       "font-size=\"10\" text-anchor=\"end\"");
        out += text_el(kLeft + w + 4, y + bh / 2 + 4, format_double(b.value),
                       "font-size=\"10\"");
    }
    out += "</svg>\n";
    return out;
}

std::string raw_color(double raw) {
    // blue (low category index) to red (high)
    const double t = std::clamp(raw, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(31 + t * (214 - 31)));
    const int g = static_cast<int>(std::lround(119 - t * (119 - 39)));
    const int b = static_cast<int>(std::lround(180 - t * (180 - 40)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string render_summary(const PlotSpec& spec) {
    std::string out = open_svg(spec.title);
    out += axis_frame(spec.x_label.empty() ? "SHAP value" : spec.x_label, spec.y_label);
    double amax = 1e-12;
    for (const auto& p : spec.summary_points) amax = std::max(amax, std::abs(p.phi));
    const double n = static_cast<double>(spec.summary_features.size());
    const double slot = kPlotH / n;
    const double x0 = kLeft + kPlotW / 2;
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x0) +
           "\" y2=\"" + num(kTop + kPlotH) + "\" stroke=\"#cccccc\"/>\n";
    for (std::size_t f = 0; f < spec.summary_features.size(); ++f) {
        const double y = kTop + slot * (static_cast<double>(f) + 0.5);
        out += text_el(kLeft - 8, y + 4, spec.summary_features[f],
                       "font-size=\"10\" text-anchor=\"end\"");
    }
    for (std::size_t i = 0; i < spec.summary_points.size(); ++i) {
        const auto& p = spec.summary_points[i];
        const double x = x0 + p.phi / amax * (kPlotW / 2 - 10);
        // deterministic jitter keeps overlapping points readable
        const double jitter =
            (static_cast<double>((i * 2654435761u) % 1000) / 1000.0 - 0.5) * slot * 0.5;
        const double y = kTop + slot * (static_cast<double>(p.feature) + 0.5) + jitter;
        out += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"2.2\" fill=\"" +
               raw_color(p.raw) + "\" fill-opacity=\"0.75\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace

std::string render_plot(const PlotSpec& spec) {
    switch (spec.kind) {
        case PlotSpec::Kind::Roc:
            if (spec.roc_series.empty()) throw DataError("ROC plot has no series");
            for (const auto& s : spec.roc_series)
                if (s.fpr.empty() || s.fpr.size() != s.tpr.size())
                    throw DataError("ROC series is empty or ragged");
            return render_roc(spec);
        case PlotSpec::Kind::RankingBar:
            if (spec.bars.empty()) throw DataError("bar plot has no bars");
            return render_bars_vertical(spec);
        case PlotSpec::Kind::ShapBar:
            if (spec.bars.empty()) throw DataError("bar plot has no bars");
            return render_bars_horizontal(spec);
        case PlotSpec::Kind::ShapSummary:
            if (spec.summary_features.empty() || spec.summary_points.empty())
                throw DataError("summary plot has no data");
            return render_summary(spec);
    }
    throw DataError("unknown plot kind");
}

namespace {

const char* kind_token(PlotSpec::Kind k) {
    switch (k) {
        case PlotSpec::Kind::Roc: return "roc";
        case PlotSpec::Kind::RankingBar: return "ranking-bar";
        case PlotSpec::Kind::ShapBar: return "shap-bar";
        case PlotSpec::Kind::ShapSummary: return "shap-summary";
    }
    return "roc";
}

PlotSpec::Kind parse_kind(const std::string& s) {
    if (s == "roc") return PlotSpec::Kind::Roc;
    if (s == "ranking-bar") return PlotSpec::Kind::RankingBar;
    if (s == "shap-bar") return PlotSpec::Kind::ShapBar;
    if (s == "shap-summary") return PlotSpec::Kind::ShapSummary;
    throw DataError("unknown plot kind: " + s);
}

} // namespace

std::string PlotSpec::to_json_text() const {
    json j;
    j["kind"] = kind_token(kind);
    j["title"] = title;
    j["x_label"] = x_label;
    j["y_label"] = y_label;
    j["roc_series"] = json::array();
    for (const auto& s : roc_series)
        j["roc_series"].push_back(
            {{"name", s.name}, {"fpr", s.fpr}, {"tpr", s.tpr}, {"auc", s.auc}});
    j["bars"] = json::array();
    for (const auto& b : bars) j["bars"].push_back({{"label", b.label}, {"value", b.value}});
    j["summary_features"] = summary_features;
    j["summary_points"] = json::array();
    for (const auto& p : summary_points)
        j["summary_points"].push_back({{"feature", p.feature}, {"phi", p.phi}, {"raw", p.raw}});
    return j.dump(2) + "\n";
}

PlotSpec PlotSpec::from_json_text(const std::string& text) {
    json j = json::parse(text);
    PlotSpec spec;
    spec.kind = parse_kind(j.at("kind").get<std::string>());
    spec.title = j.value("title", "");
    spec.x_label = j.value("x_label", "");
    spec.y_label = j.value("y_label", "");
    for (const auto& js : j.value("roc_series", json::array())) {
        RocSeries s;
        s.name = js.value("name", "");
        s.fpr = js.at("fpr").get<std::vector<double>>();
        s.tpr = js.at("tpr").get<std::vector<double>>();
        s.auc = js.at("auc").get<double>();
        spec.roc_series.push_back(std::move(s));
    }
    for (const auto& jb : j.value("bars", json::array()))
        spec.bars.push_back({jb.at("label").get<std::string>(), jb.at("value").get<double>()});
    spec.summary_features = j.value("summary_features", std::vector<std::string>{});
    for (const auto& jp : j.value("summary_points", json::array()))
        spec.summary_points.push_back({jp.at("feature").get<std::size_t>(),
                                       jp.at("phi").get<double>(),
                                       jp.at("raw").get<double>()});
    return spec;
}

} // namespace rgs
