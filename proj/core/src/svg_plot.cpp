#include "m3sim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "m3sim/error.hpp"

namespace m3sim {

namespace {

constexpr const char* kModule = "cli-report";
constexpr const char* kMemberColor = "#9e9e9e";
constexpr const char* kMetaColor = "#2e7d32";
constexpr const char* kTruthColor = "#111111";

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
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

std::string label_value(double v) {
    char buf[64];
    const double a = std::abs(v);
    if (a >= 1e6 || (a > 0 && a < 1e-2)) {
        std::snprintf(buf, sizeof buf, "%.3g", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.2f", v);
    }
    return buf;
}

TimeSeries for_display(const TimeSeries& s, std::size_t max_points) {
    if (s.size() <= max_points || max_points == 0) return s;
    return window(s, WindowSpec{(s.size() + max_points - 1) / max_points});
}

struct Frame {
    double left = 80, right = 20, top = 40, bottom = 50;
    double width = 960, height = 480;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

std::string header(const PlotOptions& o) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) +
           "\" height=\"" + std::to_string(o.height) + "\" viewBox=\"0 0 " +
           std::to_string(o.width) + " " + std::to_string(o.height) + "\">\n" +
           "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(o.width) + "\" height=\"" +
           std::to_string(o.height) + "\" fill=\"#ffffff\"/>\n";
}

}  // namespace

std::string plot_timeseries(const MultiModel& mm, const MetaModel& meta,
                            const TimeSeries* ground_truth, const PlotOptions& options) {
    if (mm.members.empty() || meta.series.empty()) {
        throw ValidationError(kModule, "nothing to plot");
    }
    struct Line {
        TimeSeries series;
        const char* color;
        double width;
        bool dashed;
        std::string label;
    };
    std::vector<Line> lines;
    for (const auto& m : mm.members) {
        lines.push_back({for_display(m.series, options.max_points), kMemberColor, 1.0, false, m.model_id});
    }
    lines.push_back({for_display(meta.series, options.max_points), kMetaColor, 2.0, false, "M"});
    if (ground_truth != nullptr && !ground_truth->empty()) {
        lines.push_back({for_display(*ground_truth, options.max_points), kTruthColor, 1.5, true, "ground truth"});
    }

    double t0 = std::numeric_limits<double>::max();
    double t1 = std::numeric_limits<double>::lowest();
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (const auto& l : lines) {
        t0 = std::min(t0, static_cast<double>(l.series.start_time));
        t1 = std::max(t1, static_cast<double>(l.series.timestamp(l.series.size() - 1)));
        for (double v : l.series.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    lo = std::min(lo, 0.0);
    if (hi <= lo) hi = lo + 1.0;
    if (t1 <= t0) t1 = t0 + 1.0;

    Frame f;
    f.width = options.width;
    f.height = options.height;
    auto x = [&](double t) { return f.left + (t - t0) / (t1 - t0) * f.plot_w(); };
    auto y = [&](double v) { return f.top + (1.0 - (v - lo) / (hi - lo)) * f.plot_h(); };

    std::string svg = header(options);
    if (!options.title.empty()) {
        svg += "<text x=\"" + num(f.width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               escape(options.title) + "</text>\n";
    }
    svg += "<g stroke=\"#000000\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top + f.plot_h()) + "\" x2=\"" +
           num(f.left + f.plot_w()) + "\" y2=\"" + num(f.top + f.plot_h()) + "\"/>\n";
    svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) +
           "\" y2=\"" + num(f.top + f.plot_h()) + "\"/>\n";
    svg += "</g>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        svg += "<text x=\"" + num(f.left - 6) + "\" y=\"" + num(y(v) + 4) + "\" text-anchor=\"end\">" +
               label_value(v) + "</text>\n";
    }
    svg += "<text x=\"" + num(f.left) + "\" y=\"" + num(f.height - 20) + "\">t=" +
           std::to_string(static_cast<long long>(t0)) + " s</text>\n";
    svg += "<text x=\"" + num(f.left + f.plot_w()) + "\" y=\"" + num(f.height - 20) +
           "\" text-anchor=\"end\">t=" + std::to_string(static_cast<long long>(t1)) + " s</text>\n";
    svg += "<text x=\"16\" y=\"" + num(f.top + f.plot_h() / 2) + "\" transform=\"rotate(-90 16 " +
           num(f.top + f.plot_h() / 2) + ")\" text-anchor=\"middle\">" +
           std::string(to_string(mm.unit)) + "</text>\n";
    svg += "</g>\n";

    for (const auto& l : lines) {
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(l.color) + "\" stroke-width=\"" +
               num(l.width) + "\"";
        if (l.dashed) svg += " stroke-dasharray=\"6 4\"";
        svg += " data-label=\"" + escape(l.label) + "\" points=\"";
        for (std::size_t i = 0; i < l.series.size(); ++i) {
            if (i) svg += ' ';
            svg += num(x(static_cast<double>(l.series.timestamp(i)))) + "," + num(y(l.series.values[i]));
        }
        svg += "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string plot_totals(const MultiModel& mm, const MetaModel& meta, const PlotOptions& options) {
    if (mm.members.empty() || meta.series.empty()) throw ValidationError(kModule, "nothing to plot");
    auto rows = totals(mm);
    rows.emplace_back("M", meta.series.values.back());

    double hi = 0.0;
    for (const auto& r : rows) hi = std::max(hi, r.second);
    if (hi <= 0.0) hi = 1.0;

    Frame f;
    f.width = options.width;
    f.height = options.height;
    f.left = 90;
    f.right = 110;
    const double band = f.plot_h() / static_cast<double>(rows.size());
    const double bar = band * 0.7;

    std::string svg = header(options);
    if (!options.title.empty()) {
        svg += "<text x=\"" + num(f.width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               escape(options.title) + "</text>\n";
    }
    svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool is_meta = i + 1 == rows.size();
        const double yy = f.top + band * static_cast<double>(i) + (band - bar) / 2;
        const double w = std::max(0.0, rows[i].second) / hi * f.plot_w();
        svg += "<rect class=\"bar\" x=\"" + num(f.left) + "\" y=\"" + num(yy) + "\" width=\"" + num(w) +
               "\" height=\"" + num(bar) + "\" fill=\"" + (is_meta ? kMetaColor : kMemberColor) + "\"/>\n";
        svg += "<text class=\"label\" x=\"" + num(f.left - 8) + "\" y=\"" + num(yy + bar / 2 + 4) +
               "\" text-anchor=\"end\">" + escape(rows[i].first) + "</text>\n";
        svg += "<text x=\"" + num(f.left + w + 6) + "\" y=\"" + num(yy + bar / 2 + 4) + "\">" +
               label_value(rows[i].second) + " " + std::string(to_string(mm.unit)) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace m3sim
