// Copyright 2026 The qadp Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <stdexcept>

namespace qadp::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        switch (c) {
            case '<': r += "&lt;"; break;
            case '>': r += "&gt;"; break;
            case '&': r += "&amp;"; break;
            default: r += c;
        }
    }
    return r;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void widen() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            double pad = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

std::vector<double> ticks(const Range& r, int target = 5) {
    double raw = (r.hi - r.lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi + step * 1e-9; t += step) out.push_back(t);
    return out;
}

}  // namespace

void write_svg(std::ostream& out, const LinePlot& plot) {
    Range xr, yr;
    for (const auto& s : plot.series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.name + "' has mismatched lengths");
        for (double v : s.x) xr.lo = std::min(xr.lo, v), xr.hi = std::max(xr.hi, v);
        for (double v : s.y) yr.lo = std::min(yr.lo, v), yr.hi = std::max(yr.hi, v);
    }
    xr.widen();
    yr.widen();

    const double left = 70, right = 150, top = 40, bottom = 50;
    const double pw = plot.width - left - right, ph = plot.height - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                       plot.width, plot.height)
        << '\n';
    out << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", plot.width, plot.height) << '\n';
    out << fmt::format(R"(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)", left + pw / 2,
                       escape(plot.title))
        << '\n';
    out << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", left, top, pw, ph)
        << '\n';
    for (double t : ticks(xr)) {
        out << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="black"/>)", px(t),
                           top + ph, top + ph + 5)
            << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{:g}</text>)", px(t), top + ph + 18, t)
            << '\n';
    }
    for (double t : ticks(yr)) {
        out << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="black"/>)", left - 5,
                           py(t), left)
            << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="end">{:g}</text>)", left - 8, py(t) + 4, t)
            << '\n';
    }
    out << fmt::format(R"(<text x="{:.2f}" y="{}" text-anchor="middle">{}</text>)", left + pw / 2, plot.height - 10,
                       escape(plot.x_label))
        << '\n';
    out << fmt::format(R"svg(<text x="16" y="{0:.2f}" text-anchor="middle" transform="rotate(-90 16 {0:.2f})">{1}</text>)svg",
                       top + ph / 2, escape(plot.y_label))
        << '\n';

    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        std::string points;
        for (std::size_t k = 0; k < s.x.size(); ++k) points += fmt::format("{:.2f},{:.2f} ", px(s.x[k]), py(s.y[k]));
        if (!points.empty()) points.pop_back();
        if (s.markers) {
            for (std::size_t k = 0; k < s.x.size(); ++k)
                out << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="2.5" fill="{}"/>)", px(s.x[k]), py(s.y[k]),
                                   color)
                    << '\n';
        } else {
            out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", color, points)
                << '\n';
        }
        double ly = top + 14 + 18 * static_cast<double>(i);
        out << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="{3}" stroke-width="2"/>)",
                           left + pw + 10, ly, left + pw + 30, color)
            << '\n';
        out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}">{}</text>)", left + pw + 36, ly + 4, escape(s.name)) << '\n';
    }
    out << "</svg>\n";
}

}  // namespace qadp::cli
