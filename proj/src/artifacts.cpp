/*
 Copyright 2026 The oed Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "oed/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "oed/config.hpp"
#include "oed/errors.hpp"

namespace oed {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
}

}  // namespace

std::string artifact_header(const std::string& config_hash, std::uint64_t seed) {
    return "# config=" + config_hash + " seed=" + std::to_string(seed) +
           " version=" + kToolVersion;
}

void write_csv(const std::string& path, const std::string& config_hash, std::uint64_t seed,
               const std::vector<std::string>& columns, const Vec& t, const Mat& values) {
    if (values.rows() != t.size() ||
        static_cast<int>(columns.size()) != values.cols() + 1)
        throw DimensionMismatch("csv columns do not match the data");
    std::ofstream out = open_out(path);
    out << artifact_header(config_hash, seed) << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (int r = 0; r < t.size(); ++r) {
        out << fmt(t(r));
        for (int c = 0; c < values.cols(); ++c) out << "," << fmt(values(r, c));
        out << "\n";
    }
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
}

void write_svg(const std::string& path, const std::string& config_hash, std::uint64_t seed,
               const std::string& title, const std::string& xlabel, const std::string& ylabel,
               const std::vector<PlotSeries>& series) {
    constexpr double W = 860, H = 480;
    constexpr double L = 70, R = 840, T = 48, B = 430;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const PlotSeries& s : series) {
        for (int i = 0; i < s.t.size(); ++i) {
            if (first) {
                xmin = xmax = s.t(i);
                ymin = ymax = s.y(i);
                first = false;
            }
            xmin = std::min(xmin, s.t(i));
            xmax = std::max(xmax, s.t(i));
            ymin = std::min(ymin, s.y(i));
            ymax = std::max(ymax, s.y(i));
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double pad = 0.06 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (R - L); };
    const auto py = [&](double y) { return B - (y - ymin) / (ymax - ymin) * (B - T); };

    std::ofstream out = open_out(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<!-- " << artifact_header(config_hash, seed).substr(2) << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (L + R) / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\""
        << " text-anchor=\"middle\">" << title << "</text>\n";

    // axes and ticks
    out << "<line x1=\"" << L << "\" y1=\"" << B << "\" x2=\"" << R << "\" y2=\"" << B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << B
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << B << "\" x2=\"" << px(xv) << "\" y2=\""
            << B + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << B + 20
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xv)
            << "</text>\n";
        out << "<line x1=\"" << L - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << L << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << L - 9 << "\" y=\"" << py(yv) + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv)
            << "</text>\n";
    }
    out << "<text x=\"" << (L + R) / 2 << "\" y=\"" << H - 8
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (T + B) / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 18 " << (T + B) / 2 << ")\">" << ylabel << "</text>\n";

    for (const PlotSeries& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
        if (s.step) {
            for (int i = 0; i < s.y.size(); ++i) {
                out << fmt(px(s.t(i))) << "," << fmt(py(s.y(i))) << " ";
                out << fmt(px(s.t(i + 1))) << "," << fmt(py(s.y(i))) << " ";
            }
        } else {
            for (int i = 0; i < s.t.size(); ++i)
                out << fmt(px(s.t(i))) << "," << fmt(py(s.y(i))) << " ";
        }
        out << "\"/>\n";
    }

    double ly = T + 14;
    for (const PlotSeries& s : series) {
        out << "<line x1=\"" << R - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << R - 120
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << R - 114 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
        ly += 18;
    }
    out << "</svg>\n";
}

}  // namespace oed
