#pragma once

// Discrete Wigner transform built from the momentum amplitudes.
//
// The state is cropped to M (power of two) contiguous momentum bins and
// zero-padded to twice its domain, which interpolates the amplitudes Y onto
// half bins.  For every half bin K
//   W_K(z) = (1 / L) sum_{a+b=2K} conj(Y_a) Y_b exp(-i z (a - b) dk / 2)
// is evaluated on 2M positions of the original domain with one FFT and every
// other row is kept.  Half bins are folded onto the M state bins with weights
// 1/4, 1/2, 1/4.  The padded state vanishes outside the original domain, so
// the even pair sums alone reproduce |chi(z)|^2 and no ghost image appears.
// The momentum marginal of a column is the same weighted sum of padded
// densities.
//
// A state that does not vanish at the box edges (wrapped around the periodic
// domain) is extended periodically instead.  The odd half bins are then zero,
// the transform reduces to the circular one, marginals stay exact, and the
// usual ghost image at z + L/2 appears.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"
#include "feqo/fft.hpp"
#include "feqo/wavepacket.hpp"

namespace feqo {

struct WignerGrid {
    std::vector<double> z_axis;   // m, rows
    std::vector<double> dk_axis;  // rad/m, columns
    std::vector<double> values;   // row-major [z][dk]
    double retained_mass = 1.0;   // momentum mass inside the cropped window
    double max_imag_residue = 0.0;  // largest |Im W| relative to max |W|
    bool periodic_extension = false;  // state reached the box edges

    std::size_t rows() const noexcept { return z_axis.size(); }
    std::size_t cols() const noexcept { return dk_axis.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double dz() const { return z_axis.size() > 1 ? z_axis[1] - z_axis[0] : 0.0; }
    double d_k() const { return dk_axis.size() > 1 ? dk_axis[1] - dk_axis[0] : 0.0; }
    double min_value() const { return *std::min_element(values.begin(), values.end()); }
    double max_value() const { return *std::max_element(values.begin(), values.end()); }
};

struct WignerOptions {
    std::size_t max_bins = 4096;      // upper bound on M
    double support_threshold = 1e-18; // bins below this fraction of the peak density are not needed
    double edge_threshold = 1e-24;    // edge density (relative to peak) above which the box is treated as periodic
    std::size_t downsample = 1;       // block-average factor applied after the transform
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// First bin of the length-m window holding the most mass.
inline std::size_t best_window(const std::vector<double>& dens, std::size_t m) {
    const std::size_t n = dens.size();
    if (m >= n) return 0;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += dens[i];
    double best = s;
    std::size_t start = 0;
    for (std::size_t i = m; i < n; ++i) {
        s += dens[i] - dens[i - m];
        if (s > best) {
            best = s;
            start = i - m + 1;
        }
    }
    return start;
}

// True when |chi|^2 at both box edges is below threshold times its peak.
inline bool contained(const Wavepacket& pos, double threshold) {
    const auto& d = pos.data();
    double peak = 0.0;
    for (const auto& a : d) peak = std::max(peak, std::norm(a));
    return std::max(std::norm(d.front()), std::norm(d.back())) <= threshold * peak;
}

// Momentum amplitudes of the state on twice its domain; bin j becomes padded bin 2j.
// Zero padding when periodic is false, periodic extension (unit norm) otherwise.
inline Wavepacket padded_momentum(const Wavepacket& wp, bool periodic) {
    const Wavepacket pos = wp.representation() == Representation::Position ? wp : to_position(wp);
    const Grid& g = pos.grid();
    const std::size_t n = g.size();
    const double len = g.length();
    const Grid pg(g.xi_min() - 0.5 * len, g.xi_max() + 0.5 * len, 2 * n);
    std::vector<cplx> padded(2 * n);
    if (periodic) {
        const double s = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < 2 * n; ++i) padded[i] = s * pos.data()[(i + n - n / 2) % n];
    } else {
        std::copy(pos.data().begin(), pos.data().end(), padded.begin() + static_cast<std::ptrdiff_t>(n / 2));
    }
    return to_momentum(Wavepacket(pg, std::move(padded), Representation::Position, wp.k_center()));
}

}  // namespace detail

/// Averages f x f blocks of cells; marginal identities survive against block-averaged densities.
inline WignerGrid block_average(const WignerGrid& w, std::size_t f) {
    if (f == 0 || w.rows() % f || w.cols() % f) throw DomainError("block size must divide both Wigner axes");
    if (f == 1) return w;
    const std::size_t nr = w.rows() / f, nc = w.cols() / f;
    WignerGrid d;
    d.retained_mass = w.retained_mass;
    d.max_imag_residue = w.max_imag_residue;
    d.periodic_extension = w.periodic_extension;
    d.z_axis.resize(nr);
    d.dk_axis.resize(nc);
    for (std::size_t i = 0; i < nr; ++i) d.z_axis[i] = w.z_axis[i * f] + 0.5 * static_cast<double>(f - 1) * w.dz();
    for (std::size_t i = 0; i < nc; ++i) d.dk_axis[i] = w.dk_axis[i * f] + 0.5 * static_cast<double>(f - 1) * w.d_k();
    d.values.assign(nr * nc, 0.0);
    const double inv = 1.0 / static_cast<double>(f * f);
    for (std::size_t r = 0; r < w.rows(); ++r)
        for (std::size_t c = 0; c < w.cols(); ++c) d.values[(r / f) * nc + c / f] += inv * w.at(r, c);
    return d;
}

inline WignerGrid wigner(const Wavepacket& wp, const WignerOptions& opt = {}) {
    if (opt.downsample == 0) throw DomainError("Wigner downsample factor must be at least 1");
    const Wavepacket mom = wp.representation() == Representation::Momentum ? wp : to_momentum(wp);
    const Grid& g = mom.grid();
    const std::size_t n = g.size();
    const auto dens = mom.density();
    const double peak = *std::max_element(dens.begin(), dens.end());
    if (!(peak > 0.0)) throw NumericalError("Wigner transform of an empty state");

    std::size_t lo = n, hi = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (dens[j] > opt.support_threshold * peak) {
            lo = std::min(lo, j);
            hi = j;
        }
    std::size_t m = std::min({detail::next_pow2(hi - lo + 1), detail::next_pow2(opt.max_bins), n});
    m = std::max<std::size_t>(m, 2);
    std::size_t start = lo;
    if (hi - lo + 1 > m || start + m > n) start = detail::best_window(dens, m);
    if (start + m > n) start = n - m;
    if (m % opt.downsample) throw DomainError("Wigner downsample factor must divide the window size");

    const double len = g.length();
    double total = 0.0, kept = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += dens[j];
    for (std::size_t a = 0; a < m; ++a) kept += dens[start + a];

    const bool periodic = !detail::contained(to_position(mom), opt.edge_threshold);
    const Wavepacket pmom = detail::padded_momentum(wp, periodic);
    const std::size_t mp = 2 * m;
    std::vector<cplx> x(mp);
    for (std::size_t a = 0; a < mp; ++a) x[a] = pmom.data()[2 * start + a];

    WignerGrid w;
    w.retained_mass = kept / total;
    w.periodic_extension = periodic;
    w.z_axis.resize(m);
    w.dk_axis.resize(m);
    for (std::size_t r = 0; r < m; ++r) w.z_axis[r] = g.xi_min() + len * static_cast<double>(r) / static_cast<double>(m);
    for (std::size_t c = 0; c < m; ++c) w.dk_axis[c] = g.k(start + c);
    w.values.assign(m * m, 0.0);

    // Phase exp(-i z0 e dk) for every half difference e in (-m, m).
    const double dk = g.d_k();
    std::vector<cplx> ph(mp);
    for (std::size_t i = 0; i < mp; ++i)
        ph[i] = std::polar(1.0, -g.xi_min() * (static_cast<double>(i) - static_cast<double>(m)) * dk);

    const double scale = 1.0 / len;
    std::vector<cplx> h(mp);
    double max_re = 0.0, max_im = 0.0;
    for (std::size_t kk = 0; kk < mp; ++kk) {
        // Padded pairs with a + b = 2 kk; e = (a - b) / 2 folds modulo 2m without overlap.
        std::fill(h.begin(), h.end(), cplx{});
        const std::size_t s2 = 2 * kk;
        const std::size_t a_lo = s2 >= mp - 1 ? s2 - (mp - 1) : 0;
        const std::size_t a_hi = std::min(s2, mp - 1);
        for (std::size_t a = a_lo; a <= a_hi; ++a) {
            const long e = static_cast<long>(a) - static_cast<long>(kk);
            const std::size_t slot = static_cast<std::size_t>(e < 0 ? e + static_cast<long>(mp) : e);
            h[slot] += std::conj(x[a]) * x[s2 - a] * ph[static_cast<std::size_t>(e + static_cast<long>(m))];
        }
        fft::transform(h, fft::Direction::Forward);
        // Even half bins land on one column, odd ones are shared by their neighbours.
        const std::size_t col = kk / 2;
        const bool odd = kk % 2;
        for (std::size_t r = 0; r < m; ++r) {
            const cplx v = scale * h[2 * r];
            max_re = std::max(max_re, std::abs(v.real()));
            max_im = std::max(max_im, std::abs(v.imag()));
            if (odd) {
                w.values[r * m + col] += 0.25 * v.real();
                if (col + 1 < m) w.values[r * m + col + 1] += 0.25 * v.real();
            } else {
                w.values[r * m + col] += 0.5 * v.real();
            }
        }
    }
    w.max_imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;

    return opt.downsample > 1 ? block_average(w, opt.downsample) : w;
}

struct MarginalErrors {
    double momentum = 0.0;  // max |sum_z W dz - |chi~|^2|, relative to the peak of |chi~|^2
    double position = 0.0;  // max |sum_k W dk - |chi(z)|^2|, relative to the peak of |chi(z)|^2
};

/// Compares both marginals of w against the full (uncropped) state.
inline MarginalErrors wigner_marginal_errors(const WignerGrid& w, const Wavepacket& wp) {
    const Wavepacket mom = wp.representation() == Representation::Momentum ? wp : to_momentum(wp);
    const Wavepacket pos = wp.representation() == Representation::Position ? wp : to_position(wp);
    const Grid& g = mom.grid();
    MarginalErrors e;

    const double dz = w.dz(), dkw = w.d_k();
    const double kpeak = [&] {
        double p = 0.0;
        for (const auto& a : mom.data()) p = std::max(p, std::norm(a));
        return p;
    }();
    const double xpeak = [&] {
        double p = 0.0;
        for (const auto& a : pos.data()) p = std::max(p, std::norm(a));
        return p;
    }();

    const Wavepacket pmom = detail::padded_momentum(wp, w.periodic_extension);
    const auto half_bin = [&](std::size_t p) {
        const auto& y = pmom.data();
        double v = 0.5 * std::norm(y[p]);
        if (p > 0) v += 0.25 * std::norm(y[p - 1]);
        if (p + 1 < y.size()) v += 0.25 * std::norm(y[p + 1]);
        return v;
    };
    // Momentum marginal: every column against the 1/4, 1/2, 1/4 padded densities it covers.
    const std::size_t fk = static_cast<std::size_t>(std::llround(dkw / g.d_k()));
    for (std::size_t c = 0; c < w.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < w.rows(); ++r) s += w.at(r, c);
        s *= dz;
        const std::size_t j0 = g.k_index(w.dk_axis[c] - 0.5 * (fk - 1) * g.d_k());
        double ref = 0.0;
        for (std::size_t i = 0; i < fk; ++i) ref += half_bin(2 * (j0 + i));
        ref /= static_cast<double>(fk);
        e.momentum = std::max(e.momentum, std::abs(s - ref) / kpeak);
    }
    // Position marginal: every row against the block average of |chi|^2 at the sampled points.
    const std::size_t fz = fk;  // the same block factor was applied to both axes
    const std::size_t base = g.size() / (w.rows() * fz);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < w.cols(); ++c) s += w.at(r, c);
        s *= dkw;
        double ref = 0.0;
        for (std::size_t i = 0; i < fz; ++i) ref += std::norm(pos.data()[(r * fz + i) * base]);
        ref /= static_cast<double>(fz);
        e.position = std::max(e.position, std::abs(s - ref) / xpeak);
    }
    return e;
}

}  // namespace feqo
