#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "embcomp/error.hpp"
#include "embcomp/sweep.hpp"
#include "embcomp/vector_store.hpp"

namespace embcomp {

namespace {

constexpr double kWidth = 860, kHeight = 520;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 60;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
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

std::string human_bytes(double b) {
    const char* units[] = {"B", "KB", "MB", "GB", "TB", "PB"};
    int u = 0;
    while (b >= 1000.0 && u < 5) {
        b /= 1000.0;
        ++u;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, b < 10 ? "%.1f %s" : "%.0f %s", b, units[u]);
    return buf;
}

double baseline_score(const std::vector<ConfigPoint>& points, const std::string& model) {
    for (const auto& p : points) {
        if (p.model == model && p.dtype == DType::f32 && p.ratio == 1.0) return p.score;
    }
    throw ValidationError("percent-loss axis needs an f32@1.0 baseline point for model '" + model + "'");
}

}  // namespace

std::string render_plot(const std::vector<ConfigPoint>& points, const std::vector<ConfigPoint>& frontier,
                        const std::vector<Budget>& budgets, const PlotOptions& options) {
    if (points.empty()) throw ValidationError("plot needs at least one point");

    const auto y_of = [&](const ConfigPoint& p) {
        if (options.axis == PlotAxis::score) return p.score;
        const double base = baseline_score(points, p.model);
        return base == 0.0 ? 0.0 : 100.0 * (p.score - base) / base;
    };

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& p : points) {
        const double x = std::log10(std::max<double>(1.0, static_cast<double>(p.storage_bytes)));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y_of(p));
        ymax = std::max(ymax, y_of(p));
    }
    for (const auto& b : budgets) {
        const double x = std::log10(std::max<double>(1.0, static_cast<double>(b.bytes)));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    xmin = std::floor(xmin);
    xmax = std::max(std::ceil(xmax), xmin + 1.0);
    if (ymax - ymin < 1e-9) {
        ymin -= 0.5;
        ymax += 0.5;
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const auto sx = [&](double bytes) {
        return kLeft + (std::log10(std::max(1.0, bytes)) - xmin) / (xmax - xmin) * pw;
    };
    const auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(options.title) + "</text>\n";

    // axes
    s += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
         num(kTop + ph) + "\"/>\n";
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(kTop + ph) +
         "\"/>\n";
    s += "</g>\n<g class=\"ticks\">\n";
    for (double e = xmin; e <= xmax + 1e-9; e += 1.0) {
        const double x = kLeft + (e - xmin) / (xmax - xmin) * pw;
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
             human_bytes(std::pow(10.0, e)) + "</text>\n";
    }
    for (int t = 0; t <= 5; ++t) {
        const double v = ymin + (ymax - ymin) * t / 5.0;
        const double y = sy(v);
        s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
             (options.axis == PlotAxis::score ? num(v) : num(v) + "%") + "</text>\n";
    }
    s += "</g>\n";
    s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" text-anchor=\"middle\">Storage (bytes, log scale)</text>\n";
    s += "<text x=\"18\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(kTop + ph / 2) + ")\">" +
         (options.axis == PlotAxis::score ? "nDCG@10" : "Change vs. f32 baseline (%)") + "</text>\n";

    // budget lines
    for (const auto& b : budgets) {
        const double x = sx(static_cast<double>(b.bytes));
        s += "<line class=\"budget\" x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(kTop + ph) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        s += "<text class=\"budget-label\" x=\"" + num(x + 3) + "\" y=\"" + num(kTop + 12) + "\">" + escape(b.label) +
             "</text>\n";
    }

    // frontier
    if (!frontier.empty()) {
        std::string pts;
        for (const auto& p : frontier) {
            if (!pts.empty()) pts += ' ';
            pts += num(sx(static_cast<double>(p.storage_bytes))) + "," + num(sy(y_of(p)));
        }
        s += "<polyline class=\"frontier\" points=\"" + pts +
             "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    }

    // one series per dtype, in dtype code order
    std::map<DType, std::vector<const ConfigPoint*>> series;
    for (const auto& p : points) series[p.dtype].push_back(&p);
    int legend_row = 0;
    for (const auto& [dtype, members] : series) {
        const char* color = kPalette[static_cast<std::size_t>(dtype)];
        s += "<g class=\"series\" data-dtype=\"" + std::string(dtype_name(dtype)) + "\" fill=\"" + color + "\">\n";
        for (const ConfigPoint* p : members) {
            s += "<circle class=\"point\" cx=\"" + num(sx(static_cast<double>(p->storage_bytes))) + "\" cy=\"" +
                 num(sy(y_of(*p))) + "\" r=\"4\"><title>" + escape(p->model) + " " +
                 std::string(dtype_name(p->dtype)) + "@" + num(p->ratio * 100.0) + "% " + num(p->score) +
                 "</title></circle>\n";
        }
        s += "</g>\n";
        const double ly = kTop + 10 + 18.0 * legend_row++;
        s += "<circle class=\"legend\" cx=\"" + num(kLeft + pw + 20) + "\" cy=\"" + num(ly) + "\" r=\"4\" fill=\"" +
             color + "\"/>\n";
        s += "<text x=\"" + num(kLeft + pw + 30) + "\" y=\"" + num(ly + 4) + "\">" + std::string(dtype_name(dtype)) +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

void emit_plot(const std::vector<ConfigPoint>& points, const std::vector<ConfigPoint>& frontier,
               const std::vector<Budget>& budgets, const std::filesystem::path& path, const PlotOptions& options) {
    write_text_file(path, render_plot(points, frontier, budgets, options));
}

}  // namespace embcomp
