#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "combandit/trace.hpp"

namespace combandit {

struct PlotOptions {
    std::string title;
    std::vector<std::string> provenance;  // emitted as XML comments
    int width = 720;
    int height = 440;
};

namespace detail {

inline std::string svg_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
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

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace detail

/// Self-contained SVG: cumulative regret against log10(t), one mean line and
/// a shaded +/-1 std band per curve.
inline std::string render_regret_svg(std::span<const AggregateCurve> curves, const PlotOptions& options = {}) {
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double w = options.width - left - right;
    const double h = options.height - top - bottom;

    std::uint64_t t_max = 1;
    double y_max = 0.0;
    for (const auto& c : curves) {
        if (!c.t.empty()) t_max = std::max(t_max, c.t.back());
        for (std::size_t i = 0; i < c.t.size(); ++i) y_max = std::max(y_max, c.mean_regret[i] + c.std_regret[i]);
    }
    if (!(y_max > 0.0)) y_max = 1.0;
    const double decades = std::max(1.0, std::ceil(std::log10(static_cast<double>(t_max))));
    auto px = [&](double t) { return left + w * std::log10(std::max(t, 1.0)) / decades; };
    auto py = [&](double y) { return top + h * (1.0 - y / y_max); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::string note : options.provenance) {
        for (auto pos = note.find("--"); pos != std::string::npos; pos = note.find("--", pos)) note.replace(pos, 2, "- -");
        svg << "<!-- " << note << " -->\n";
    }
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << detail::svg_num(left + w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
            << detail::xml_escape(options.title) << "</text>\n";
    }

    // Axes, decade ticks and five horizontal grid lines.
    svg << "<g stroke=\"#444\" fill=\"none\">\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + h << "\" x2=\"" << left + w << "\" y2=\"" << top + h << "\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + h << "\"/>\n";
    svg << "</g>\n<g fill=\"#222\">\n";
    for (int d = 0; d <= static_cast<int>(decades); ++d) {
        const double x = px(std::pow(10.0, d));
        svg << "<line x1=\"" << detail::svg_num(x) << "\" y1=\"" << top + h << "\" x2=\"" << detail::svg_num(x)
            << "\" y2=\"" << top + h + 5 << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << detail::svg_num(x) << "\" y=\"" << top + h + 18 << "\" text-anchor=\"middle\">1e" << d
            << "</text>\n";
    }
    for (int j = 0; j <= 5; ++j) {
        const double y = y_max * j / 5.0;
        svg << "<line x1=\"" << left << "\" y1=\"" << detail::svg_num(py(y)) << "\" x2=\"" << left + w << "\" y2=\""
            << detail::svg_num(py(y)) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << detail::svg_num(py(y) + 4) << "\" text-anchor=\"end\">"
            << detail::xml_escape(fmt::num(std::round(y * 100.0) / 100.0)) << "</text>\n";
    }
    svg << "<text x=\"" << detail::svg_num(left + w / 2) << "\" y=\"" << options.height - 10
        << "\" text-anchor=\"middle\">step t (log scale)</text>\n";
    svg << "<text transform=\"translate(18," << detail::svg_num(top + h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">cumulative regret</text>\n</g>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& curve = curves[c];
        const char* color = detail::kPalette[c % std::size(detail::kPalette)];
        if (curve.t.empty()) continue;
        std::ostringstream band, line;
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            band << (i ? " L" : "M") << detail::svg_num(px(static_cast<double>(curve.t[i]))) << ','
                 << detail::svg_num(py(curve.mean_regret[i] + curve.std_regret[i]));
        }
        for (std::size_t i = curve.t.size(); i-- > 0;) {
            band << " L" << detail::svg_num(px(static_cast<double>(curve.t[i]))) << ','
                 << detail::svg_num(py(std::max(0.0, curve.mean_regret[i] - curve.std_regret[i])));
        }
        band << " Z";
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            line << (i ? " L" : "M") << detail::svg_num(px(static_cast<double>(curve.t[i]))) << ','
                 << detail::svg_num(py(curve.mean_regret[i]));
        }
        svg << "<path d=\"" << band.str() << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        svg << "<path d=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
        const double ly = top + 16 + 18.0 * static_cast<double>(c);
        svg << "<line x1=\"" << left + w + 14 << "\" y1=\"" << detail::svg_num(ly) << "\" x2=\"" << left + w + 36
            << "\" y2=\"" << detail::svg_num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
        svg << "<text x=\"" << left + w + 42 << "\" y=\"" << detail::svg_num(ly + 4) << "\">"
            << detail::xml_escape(curve.policy) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace combandit
