#pragma once

// Binary PPM (P6) rendering of a DataGrid, one pixel per cell, row 0 on top.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "feqo/errors.hpp"
#include "feqo/grid_io.hpp"

namespace feqo {

enum class ColorMap { Auto, Sequential, Diverging };
enum class Scale { Linear, SymLog };

struct HeatmapOptions {
    Scale scale = Scale::Linear;
    ColorMap colormap = ColorMap::Auto;  // diverging when the grid has negative values
    double symlog_decades = 4.0;         // dynamic range kept below the maximum magnitude
};

using Rgb = std::array<std::uint8_t, 3>;

namespace detail {

inline Rgb lerp_anchors(const std::array<std::array<double, 4>, 5>& a, double x) {
    x = std::clamp(x, 0.0, 1.0);
    std::size_t i = 0;
    while (i + 2 < a.size() && x > a[i + 1][0]) ++i;
    const double t = (x - a[i][0]) / (a[i + 1][0] - a[i][0]);
    Rgb c;
    for (int k = 0; k < 3; ++k)
        c[k] = static_cast<std::uint8_t>(std::lround(255.0 * (a[i][k + 1] + t * (a[i + 1][k + 1] - a[i][k + 1]))));
    return c;
}

// Dark violet through red and orange to pale yellow.
inline Rgb sequential(double x) {
    static constexpr std::array<std::array<double, 4>, 5> a{{{0.0, 0.0, 0.0, 0.02},
                                                             {0.25, 0.25, 0.04, 0.42},
                                                             {0.5, 0.72, 0.2, 0.33},
                                                             {0.75, 0.98, 0.55, 0.04},
                                                             {1.0, 0.99, 1.0, 0.64}}};
    return lerp_anchors(a, x);
}

// Blue, white at zero, red.
inline Rgb diverging(double x) {
    static constexpr std::array<std::array<double, 4>, 5> a{{{0.0, 0.02, 0.19, 0.38},
                                                             {0.25, 0.4, 0.66, 0.81},
                                                             {0.5, 0.97, 0.97, 0.97},
                                                             {0.75, 0.96, 0.56, 0.45},
                                                             {1.0, 0.4, 0.0, 0.12}}};
    return lerp_anchors(a, x);
}

}  // namespace detail

inline std::string render_heatmap(const DataGrid& g, const HeatmapOptions& opt = {}) {
    if (g.values.size() != g.rows * g.cols || g.values.empty()) throw DomainError("grid is empty or inconsistent");
    double vmin = g.values[0], vmax = g.values[0];
    for (double v : g.values) {
        if (!std::isfinite(v)) throw NumericalError("grid contains non-finite values");
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    const bool div = opt.colormap == ColorMap::Diverging || (opt.colormap == ColorMap::Auto && vmin < 0.0);
    const double amax = std::max(std::abs(vmin), std::abs(vmax));
    const double lin = amax * std::pow(10.0, -opt.symlog_decades);
    auto tf = [&](double v) {
        if (opt.scale == Scale::Linear) return v;
        return std::copysign(std::log10(1.0 + std::abs(v) / lin), v);
    };
    double lo = tf(vmin), hi = tf(vmax);
    if (div) {
        const double m = std::max(std::abs(lo), std::abs(hi));
        lo = -m;
        hi = m;
    }
    const double span = hi - lo;

    std::string out = "P6\n" + std::to_string(g.cols) + " " + std::to_string(g.rows) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + 3 * g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double x = span > 0.0 ? (tf(g.values[i]) - lo) / span : (div ? 0.5 : 0.0);
        const Rgb c = div ? detail::diverging(x) : detail::sequential(x);
        out[header + 3 * i] = static_cast<char>(c[0]);
        out[header + 3 * i + 1] = static_cast<char>(c[1]);
        out[header + 3 * i + 2] = static_cast<char>(c[2]);
    }
    return out;
}

struct PpmImage {
    std::size_t width = 0, height = 0;
    std::string pixels;  // RGB triples
};

inline PpmImage parse_ppm(const std::string& bytes) {
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size()) {
            if (std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            else if (bytes[pos] == '#') while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            else break;
        }
        const std::size_t b = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return bytes.substr(b, pos - b);
    };
    if (token() != "P6") throw IoError("not a binary PPM (P6) image");
    PpmImage img;
    try {
        img.width = std::stoul(token());
        img.height = std::stoul(token());
        if (token() != "255") throw IoError("PPM max value must be 255");
    } catch (const std::logic_error&) {
        throw IoError("malformed PPM header");
    }
    ++pos;
    if (bytes.size() - pos != 3 * img.width * img.height) throw IoError("PPM payload size mismatch");
    img.pixels = bytes.substr(pos);
    return img;
}

}  // namespace feqo
