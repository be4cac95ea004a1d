#pragma once

// Spectral observables: sideband populations in windows centred on odd
// multiples of q/2, per-window peaks and lobe splitting, and the gradient
// quadrature that predicts the Stern-Gerlach momentum shift.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"
#include "feqo/field_profile.hpp"
#include "feqo/physics.hpp"
#include "feqo/wavepacket.hpp"

namespace feqo {

struct Spectrum {
    std::vector<double> dk;       // rad/m, increasing
    std::vector<double> density;  // |chi~|^2, per rad/m
    double d_k = 0.0;
};

inline Spectrum spectrum(const Wavepacket& wp) {
    const Wavepacket m = wp.representation() == Representation::Momentum ? wp : to_momentum(wp);
    Spectrum s;
    s.dk = m.grid().k_axis();
    s.density = m.density();
    s.d_k = m.grid().d_k();
    return s;
}

struct Peak {
    double dk = 0.0;      // rad/m, sub-bin interpolated
    double height = 0.0;
};

struct SidebandWindow {
    int order = 1;              // odd n; the window is centred at n q / 2
    double center = 0.0;        // rad/m
    double population = 0.0;
    double mean_dk = 0.0;       // rad/m; equals center when the window is empty
    double shift = 0.0;         // mean_dk - center
    std::vector<Peak> peaks;    // descending height
};

struct SidebandReport {
    double q = 0.0;
    double half_width = 0.0;    // rad/m
    std::vector<SidebandWindow> windows;  // orders +5, +3, +1, -1, -3, -5
    double leakage = 0.0;       // 1 - p(+1/2) - p(-1/2)
    double covered = 0.0;       // total population inside all windows

    const SidebandWindow& window(int order) const {
        for (const auto& w : windows)
            if (w.order == order) return w;
        throw DomainError("no sideband window of order " + std::to_string(order));
    }
    double population(int order) const { return window(order).population; }
};

namespace detail {

// Vertex of the parabola through three equally spaced samples, as an offset in bins.
inline double parabola_offset(double ym, double y0, double yp) {
    const double den = ym - 2.0 * y0 + yp;
    if (den >= 0.0) return 0.0;
    return std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
}

}  // namespace detail

/// Local maxima of the spectrum inside [lo, hi), above `threshold`, with quadratic refinement.
inline std::vector<Peak> find_peaks(const Spectrum& s, double lo, double hi, double threshold) {
    std::vector<Peak> peaks;
    const std::size_t n = s.density.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s.dk[i] < lo || s.dk[i] >= hi) continue;
        const double y0 = s.density[i];
        if (!(y0 > threshold)) continue;
        const double ym = s.density[i - 1], yp = s.density[i + 1];
        if (!(y0 > ym && y0 >= yp)) continue;
        const double off = detail::parabola_offset(ym, y0, yp);
        const double h = y0 - 0.25 * (ym - yp) * off;
        peaks.push_back({s.dk[i] + off * s.d_k, h});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

struct SidebandOptions {
    double half_width_over_q = 0.25;
    double peak_fraction = 0.05;  // of the global spectral maximum
};

inline SidebandReport sideband_populations(const Spectrum& s, double q, const SidebandOptions& opt = {}) {
    if (!(q > 0.0)) throw DomainError("recoil q must be positive");
    if (!(opt.half_width_over_q > 0.0)) throw DomainError("window half-width must be positive");
    if (opt.half_width_over_q > 0.25 + 1e-12)
        throw NumericalError("window half-width " + std::to_string(opt.half_width_over_q) +
                             " q makes neighbouring sideband windows overlap (limit 0.25 q)");
    SidebandReport r;
    r.q = q;
    r.half_width = opt.half_width_over_q * q;
    const double gmax = s.density.empty() ? 0.0 : *std::max_element(s.density.begin(), s.density.end());
    for (int order : {5, 3, 1, -1, -3, -5}) {
        SidebandWindow w;
        w.order = order;
        w.center = 0.5 * order * q;
        const double lo = w.center - r.half_width, hi = w.center + r.half_width;
        double p = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < s.dk.size(); ++i) {
            if (s.dk[i] < lo || s.dk[i] >= hi) continue;
            const double v = s.density[i] * s.d_k;
            p += v;
            m1 += v * s.dk[i];
        }
        w.population = p;
        w.mean_dk = p > 0.0 ? m1 / p : w.center;
        w.shift = w.mean_dk - w.center;
        w.peaks = find_peaks(s, lo, hi, opt.peak_fraction * gmax);
        r.covered += p;
        r.windows.push_back(std::move(w));
    }
    r.leakage = 1.0 - r.population(1) - r.population(-1);
    return r;
}

inline SidebandReport sideband_populations(const Wavepacket& wp, double q, const SidebandOptions& opt = {}) {
    return sideband_populations(spectrum(wp), q, opt);
}

struct SplitMeasurement {
    double split = 0.0;       // rad/m, non-negative
    bool single_lobe = false;
    std::vector<Peak> lobes;  // the two (or one) peaks used, ascending in dk
};

/// Distance between the two highest peaks of a window.
inline SplitMeasurement measure_split(const SidebandReport& report, int order) {
    const SidebandWindow& w = report.window(order);
    if (w.peaks.empty())
        throw NumericalError("no spectral peak in the window centred at " + std::to_string(0.5 * order) + " q");
    SplitMeasurement m;
    if (w.peaks.size() < 2) {
        m.single_lobe = true;
        m.lobes = {w.peaks.front()};
        return m;
    }
    m.lobes = {w.peaks[0], w.peaks[1]};
    if (m.lobes[0].dk > m.lobes[1].dk) std::swap(m.lobes[0], m.lobes[1]);
    m.split = m.lobes[1].dk - m.lobes[0].dk;
    return m;
}

struct UsgPrediction {
    double integral = 0.0;    // (1/hbar) int grad|Omega| dt, rad/m
    double separation = 0.0;  // lobe separation 2 * integral (opposite shifts of the two pseudospin states)
};

/// Quadrature of the coupling gradient along z(t) = z0 + v t (Simpson, n_intervals even).
inline UsgPrediction usg_prediction(const FieldProfile& profile, const ElectronParams& electron,
                                    const LaserGratingParams& laser, double total_time, double z0 = 0.0,
                                    double velocity = 0.0, std::size_t n_intervals = 4096) {
    if (!(total_time >= 0.0)) throw DomainError("interaction time must be non-negative");
    if (n_intervals % 2) ++n_intervals;
    const double per_field = rabi_frequency(electron, laser, 1.0);
    const double h = total_time / static_cast<double>(n_intervals);
    double sum = 0.0;
    for (std::size_t i = 0; i <= n_intervals; ++i) {
        const double t = h * static_cast<double>(i);
        const double w = (i == 0 || i == n_intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * field_gradient_at(profile, z0 + velocity * t, t);
    }
    UsgPrediction p;
    p.integral = per_field * sum * h / 3.0 / constants::hbar;
    p.separation = 2.0 * p.integral;
    return p;
}

/// Total-variation distance 0.5 * sum |a - b| d_k between two spectra on the same axis.
inline double total_variation(const Spectrum& a, const Spectrum& b) {
    if (a.density.size() != b.density.size()) throw DomainError("spectra have different lengths");
    double s = 0.0;
    for (std::size_t i = 0; i < a.density.size(); ++i) s += std::abs(a.density[i] - b.density[i]);
    return 0.5 * s * a.d_k;
}

}  // namespace feqo
