#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rdbench/bd.hpp"
#include "rdbench/csv.hpp"
#include "rdbench/errors.hpp"
#include "rdbench/pchip.hpp"
#include "rdbench/rd_types.hpp"

namespace rdbench::svg {

namespace fs = std::filesystem;

// Output is deterministic by construction: fixed ordering, fixed numeric
// precision, no timestamps or generator metadata.

namespace detail {

inline std::string num(double v) { return csv::fixed(v, 2); }

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                            "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                                            "#bcbd22", "#e377c2"};
    return p;
}

struct Canvas {
    int width, height;
    std::ostringstream body;

    Canvas(int w, int h) : width(w), height(h) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double sw = 1.0, const std::string& dash = {}) {
        body << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
             << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << num(sw) << "\"";
        if (!dash.empty()) body << " stroke-dasharray=\"" << dash << "\"";
        body << "/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke) {
        body << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
             << "\" fill=\"" << fill << "\" stroke=\"" << stroke
             << "\" stroke-width=\"1.2\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double sw = 1.5) {
        body << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
             << num(sw) << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) body << ' ';
            body << num(pts[i].first) << ',' << num(pts[i].second);
        }
        body << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 11,
              const std::string& anchor = "start", const std::string& fill = "#333333") {
        body << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\""
             << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill
             << "\">" << s << "</text>\n";
    }

    std::string render() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
            << "\">\n<rect width=\"" << width << "\" height=\"" << height
            << "\" fill=\"white\"/>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

struct Frame {
    double x0, y0, x1, y1;       // pixel box (y grows down)
    double lo_x, hi_x;           // data range, x already log10 when log-scaled
    double lo_y, hi_y;

    double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * (x1 - x0); }
    double py(double y) const { return y1 - (y - lo_y) / (hi_y - lo_y) * (y1 - y0); }
};

inline std::vector<double> linear_ticks(double lo, double hi, int target = 6) {
    double span = hi - lo;
    if (span <= 0) return {lo};
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
    return ticks;
}

// Decade ticks with 2x and 5x subdivisions when the span is narrow.
inline std::vector<double> log_ticks(double lo_log, double hi_log) {
    std::vector<double> ticks;
    bool sparse = (hi_log - lo_log) > 2.5;
    for (int d = static_cast<int>(std::floor(lo_log)) - 1;
         d <= static_cast<int>(std::ceil(hi_log)); ++d) {
        for (double m : sparse ? std::vector<double>{1.0} : std::vector<double>{1.0, 2.0, 5.0}) {
            double v = d + std::log10(m);
            if (v >= lo_log - 1e-9 && v <= hi_log + 1e-9) ticks.push_back(v);
        }
    }
    return ticks;
}

inline std::string rate_label(double log_rate) {
    double v = std::pow(10.0, log_rate);
    if (v >= 1000.0) return csv::fixed(v / 1000.0, v >= 10000.0 ? 0 : 1) + "M";
    return csv::fixed(v, v < 10 ? 1 : 0) + "k";
}

inline double metric_value(const csv::PerQpRow& r, MetricKind m) {
    switch (m) {
        case MetricKind::vmaf: return r.vmaf;
        case MetricKind::vmaf_neg: return r.vmaf_neg;
        case MetricKind::psnr_y: return r.psnr_y;
        case MetricKind::ms_ssim: return r.ms_ssim;
    }
    return 0.0;
}

struct Series {
    std::string sequence;
    std::string variant;
    std::vector<std::pair<double, double>> points;  // (log10 kbps, score)
    bool is_baseline = false;
};

// Fitted curve sampled for drawing: the same quality->log-rate PCHIP used by
// the BD computation, rendered into (log-rate, score) pixel space.
inline std::vector<std::pair<double, double>> fitted_polyline(const Series& s,
                                                              const Frame& f) {
    std::vector<double> q, lr;
    for (const auto& [x, y] : s.points) {
        lr.push_back(x);
        q.push_back(y);
    }
    std::vector<std::size_t> idx(q.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return q[a] < q[b]; });
    std::vector<double> qs, ls;
    for (auto i : idx) {
        if (!qs.empty() && q[i] - qs.back() < 1e-6) continue;
        qs.push_back(q[i]);
        ls.push_back(lr[i]);
    }
    std::vector<std::pair<double, double>> out;
    if (qs.size() < 2) return out;
    auto fit = bd::pchip_fit(qs, ls);
    const int kSamples = 120;
    for (int i = 0; i <= kSamples; ++i) {
        double quality = qs.front() + (qs.back() - qs.front()) * i / double(kSamples);
        out.emplace_back(f.px(fit(quality)), f.py(quality));
    }
    return out;
}

inline void draw_axes(Canvas& c, const Frame& f, const std::string& x_label,
                      const std::string& y_label, bool log_x) {
    c.line(f.x0, f.y1, f.x1, f.y1, "#444444", 1.0);
    c.line(f.x0, f.y0, f.x0, f.y1, "#444444", 1.0);
    auto xticks = log_x ? log_ticks(f.lo_x, f.hi_x) : linear_ticks(f.lo_x, f.hi_x);
    for (double t : xticks) {
        double x = f.px(t);
        c.line(x, f.y1, x, f.y1 + 4, "#444444", 1.0);
        c.line(x, f.y0, x, f.y1, "#dddddd", 0.5);
        c.text(x, f.y1 + 16, log_x ? rate_label(t) : num(t), 10, "middle");
    }
    for (double t : linear_ticks(f.lo_y, f.hi_y)) {
        double y = f.py(t);
        c.line(f.x0 - 4, y, f.x0, y, "#444444", 1.0);
        c.line(f.x0, y, f.x1, y, "#dddddd", 0.5);
        c.text(f.x0 - 7, y + 3, num(t), 10, "end");
    }
    c.text((f.x0 + f.x1) / 2, f.y1 + 32, x_label, 11, "middle");
    c.text(f.x0, f.y0 - 8, y_label, 11, "start");
}

}  // namespace detail

// One RD chart: every series' four markers (open = baseline, filled =
// variants) plus the PCHIP-fitted curve, bitrate on a log axis.
inline std::string rd_chart(const std::vector<detail::Series>& series,
                            const std::string& title, MetricKind metric, int width = 860,
                            int height = 560) {
    if (series.empty()) throw invalid_input_error("rd_chart: no series");
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            lo_x = std::min(lo_x, x);
            hi_x = std::max(hi_x, x);
            lo_y = std::min(lo_y, y);
            hi_y = std::max(hi_y, y);
        }
    double pad_x = (hi_x - lo_x) * 0.05 + 1e-6, pad_y = (hi_y - lo_y) * 0.06 + 1e-6;
    detail::Canvas c(width, height);
    detail::Frame f{58.0,  28.0,  width - 16.0, height - 44.0,
                    lo_x - pad_x, hi_x + pad_x, lo_y - pad_y, hi_y + pad_y};
    detail::draw_axes(c, f, "bitrate", metric_name(metric), true);
    c.text((f.x0 + f.x1) / 2, 16, title, 12, "middle", "#111111");

    std::map<std::string, std::size_t> color_of;
    for (const auto& s : series)
        color_of.emplace(s.sequence, color_of.size() % detail::palette().size());

    for (const auto& s : series) {
        const std::string& color = detail::palette()[color_of[s.sequence]];
        auto curve = detail::fitted_polyline(s, f);
        if (!curve.empty()) c.polyline(curve, color, s.is_baseline ? 1.0 : 1.6);
        for (const auto& [x, y] : s.points)
            c.circle(f.px(x), f.py(y), 3.4, s.is_baseline ? "white" : color, color);
    }

    // legend: sequences by color, then marker convention
    double ly = 40.0;
    for (const auto& [seq, ci] : color_of) {
        c.circle(f.x0 + 12, ly - 3, 3.4, detail::palette()[ci], detail::palette()[ci]);
        c.text(f.x0 + 20, ly, seq, 10);
        ly += 14.0;
    }
    c.text(f.x0 + 12, ly, "open = baseline, filled = variant", 10, "start", "#555555");
    return c.render();
}

// Emits one combined chart plus one per-sequence panel for the metric.
// Returns the written paths in emission order.
inline std::vector<fs::path> write_rd_plots(const std::vector<csv::PerQpRow>& rows,
                                            const std::string& baseline_variant,
                                            MetricKind metric, const fs::path& out_dir,
                                            const std::string& prefix = "rd") {
    if (rows.empty()) throw invalid_input_error("write_rd_plots: no rows");
    fs::create_directories(out_dir);

    std::map<std::pair<std::string, std::string>, detail::Series> grouped;
    for (const auto& r : rows) {
        auto& s = grouped[{r.sequence, r.variant}];
        s.sequence = r.sequence;
        s.variant = r.variant;
        s.is_baseline = (r.variant == baseline_variant);
        s.points.emplace_back(std::log10(r.bitrate_kbps), detail::metric_value(r, metric));
    }
    for (auto& [key, s] : grouped)
        std::sort(s.points.begin(), s.points.end());

    std::vector<detail::Series> all;
    for (const auto& [key, s] : grouped) all.push_back(s);

    std::vector<fs::path> written;
    auto combined = out_dir / (prefix + "_combined_" + metric_name(metric) + ".svg");
    csv::write_file_atomic(combined,
                           rd_chart(all, std::string("RD curves, ") + metric_name(metric),
                                    metric));
    written.push_back(combined);

    std::vector<std::string> sequences;
    for (const auto& [key, s] : grouped)
        if (sequences.empty() || sequences.back() != key.first)
            sequences.push_back(key.first);
    for (const auto& seq : sequences) {
        std::vector<detail::Series> panel;
        for (const auto& [key, s] : grouped)
            if (key.first == seq) panel.push_back(s);
        auto path = out_dir / (prefix + "_" + seq + "_" + metric_name(metric) + ".svg");
        csv::write_file_atomic(path,
                               rd_chart(panel, seq + std::string(", ") + metric_name(metric),
                                        metric, 430, 320));
        written.push_back(path);
    }
    return written;
}

// BD-VMAF vs BD-VMAF-NEG scatter with quadrant lines; upper-right points are
// the regressions.
inline fs::path write_bd_scatter(const std::vector<csv::SummaryRow>& rows,
                                 const fs::path& out_path) {
    if (rows.empty()) throw invalid_input_error("write_bd_scatter: no rows");
    double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
    for (const auto& r : rows) {
        double x = r.bd.at(MetricKind::vmaf), y = r.bd.at(MetricKind::vmaf_neg);
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    }
    double pad_x = (hi_x - lo_x) * 0.08 + 1.0, pad_y = (hi_y - lo_y) * 0.08 + 1.0;
    detail::Canvas c(640, 520);
    detail::Frame f{58.0, 28.0, 624.0, 476.0, lo_x - pad_x, hi_x + pad_x, lo_y - pad_y,
                    hi_y + pad_y};
    detail::draw_axes(c, f, "BD-VMAF (%)", "BD-VMAF-NEG (%)", false);
    c.line(f.px(0.0), f.y0, f.px(0.0), f.y1, "#888888", 1.0, "4,3");
    c.line(f.x0, f.py(0.0), f.x1, f.py(0.0), "#888888", 1.0, "4,3");

    std::vector<csv::SummaryRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.sequence < b.sequence; });
    for (const auto& r : sorted) {
        double x = f.px(r.bd.at(MetricKind::vmaf)), y = f.py(r.bd.at(MetricKind::vmaf_neg));
        bool regression = r.bd.at(MetricKind::vmaf) > 0 && r.bd.at(MetricKind::vmaf_neg) > 0;
        c.circle(x, y, 4.0, regression ? "#d62728" : "#1f77b4", "#333333");
        c.text(x + 6, y - 5, r.sequence, 9, "start", "#555555");
    }
    c.text((f.x0 + f.x1) / 2, 16, "BD-VMAF vs BD-VMAF-NEG", 12, "middle", "#111111");
    csv::write_file_atomic(out_path, c.render());
    return out_path;
}

}  // namespace rdbench::svg
