#pragma once

// Electron envelope chi on a uniform periodic grid in the co-moving
// coordinate xi, in either position or momentum (delta-k) representation.
//
// Fourier convention (continuous-transform samples, unitary on the grid):
//   chi~(k_j) = d_xi / sqrt(2 pi) * sum_n chi(xi_n) exp(-i k_j xi_n)
//   chi(xi_n) = d_k  / sqrt(2 pi) * sum_j chi~(k_j) exp(+i k_j xi_n)
// with xi_n = xi_min + n d_xi and k_j = (j - N/2) d_k, d_k = 2 pi / (xi_max - xi_min).
// The delta-k axis is therefore always monotonically increasing.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"
#include "feqo/fft.hpp"
#include "feqo/physics.hpp"

namespace feqo {

using cplx = std::complex<double>;

class Grid {
public:
    Grid() = default;
    Grid(double xi_min, double xi_max, std::size_t n_points)
        : xi_min_(xi_min), xi_max_(xi_max), n_points_(n_points) {
        if (n_points < 2 || (n_points & (n_points - 1)) != 0)
            throw DomainError("grid size must be a power of two >= 2, got " + std::to_string(n_points));
        if (!(xi_max > xi_min)) throw DomainError("grid bounds must satisfy xi_max > xi_min");
        d_xi_ = (xi_max - xi_min) / static_cast<double>(n_points);
    }

    /// Grid of n_points spanning n_periods grating periods, centred on xi = 0.
    static Grid periodic_cells(double period, std::size_t n_periods, std::size_t n_points) {
        const double half = 0.5 * period * static_cast<double>(n_periods);
        return Grid(-half, half, n_points);
    }

    double xi_min() const noexcept { return xi_min_; }
    double xi_max() const noexcept { return xi_max_; }
    std::size_t size() const noexcept { return n_points_; }
    double d_xi() const noexcept { return d_xi_; }
    double length() const noexcept { return xi_max_ - xi_min_; }
    double d_k() const noexcept { return constants::two_pi / length(); }

    double xi(std::size_t n) const noexcept { return xi_min_ + static_cast<double>(n) * d_xi_; }
    double k(std::size_t j) const noexcept {
        return (static_cast<double>(j) - static_cast<double>(n_points_ / 2)) * d_k();
    }
    double k_min() const noexcept { return k(0); }
    double k_max() const noexcept { return k(n_points_ - 1); }

    /// Index of the momentum bin nearest to dk (clamped to the grid).
    std::size_t k_index(double dk) const noexcept {
        const double j = std::round(dk / d_k()) + static_cast<double>(n_points_ / 2);
        if (j <= 0.0) return 0;
        if (j >= static_cast<double>(n_points_ - 1)) return n_points_ - 1;
        return static_cast<std::size_t>(j);
    }

    std::vector<double> xi_axis() const {
        std::vector<double> a(n_points_);
        for (std::size_t n = 0; n < n_points_; ++n) a[n] = xi(n);
        return a;
    }
    std::vector<double> k_axis() const {
        std::vector<double> a(n_points_);
        for (std::size_t j = 0; j < n_points_; ++j) a[j] = k(j);
        return a;
    }

    bool operator==(const Grid&) const = default;

private:
    double xi_min_ = -1.0;
    double xi_max_ = 1.0;
    std::size_t n_points_ = 2;
    double d_xi_ = 1.0;
};

enum class Representation { Position, Momentum };

class Wavepacket {
public:
    Wavepacket() = default;
    Wavepacket(Grid grid, std::vector<cplx> amplitudes, Representation rep, double k_center)
        : grid_(grid), amps_(std::move(amplitudes)), rep_(rep), k_center_(k_center) {
        if (amps_.size() != grid_.size())
            throw DomainError("amplitude count " + std::to_string(amps_.size()) + " does not match grid size " +
                              std::to_string(grid_.size()));
    }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    const std::vector<cplx>& data() const noexcept { return amps_; }
    Representation representation() const noexcept { return rep_; }
    double k_center() const noexcept { return k_center_; }

    /// Measure of one sample on the native axis.
    double cell() const noexcept { return rep_ == Representation::Position ? grid_.d_xi() : grid_.d_k(); }

    std::vector<double> axis() const { return rep_ == Representation::Position ? grid_.xi_axis() : grid_.k_axis(); }

    double norm() const noexcept {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s * cell();
    }

    /// |amplitude|^2 on the native axis (a probability density).
    std::vector<double> density() const {
        std::vector<double> d(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) d[i] = std::norm(amps_[i]);
        return d;
    }

private:
    Grid grid_;
    std::vector<cplx> amps_;
    Representation rep_ = Representation::Position;
    double k_center_ = 0.0;
};

struct Superposition {
    double dk_offset = 0.0;  // centre of the second component, units of q
    cplx weight{1.0, 0.0};   // amplitude relative to the first component
};

struct WavepacketSpec {
    double delta_k = 0.02;    // standard deviation of |chi~|^2, units of q
    double dk_offset = 0.5;   // centre of the first component, units of q
    double chirp_drift = 0.0; // free drift length L_D (m); 0 = none
    std::optional<Superposition> superposition;
};

namespace detail {

inline void check_representation(const Wavepacket& wp, Representation want, const char* what) {
    if (wp.representation() != want)
        throw DomainError(std::string(what) + ": wavepacket is in the wrong representation");
}

// Mass of a unit Gaussian density (centre c, std s) outside [lo, hi].
inline double gaussian_tail(double c, double s, double lo, double hi) {
    const double r2 = std::sqrt(2.0) * s;
    return 0.5 * std::erfc((c - lo) / r2) + 0.5 * std::erfc((hi - c) / r2);
}

}  // namespace detail

inline Wavepacket to_momentum(const Wavepacket& wp) {
    detail::check_representation(wp, Representation::Position, "to_momentum");
    const Grid& g = wp.grid();
    const std::size_t n = g.size();
    std::vector<cplx> buf(wp.data());
    for (std::size_t i = 1; i < n; i += 2) buf[i] = -buf[i];
    fft::transform(buf, fft::Direction::Forward);
    const double scale = g.d_xi() / std::sqrt(constants::two_pi);
    for (std::size_t j = 0; j < n; ++j) buf[j] *= scale * std::polar(1.0, -g.k(j) * g.xi_min());
    return Wavepacket(g, std::move(buf), Representation::Momentum, wp.k_center());
}

inline Wavepacket to_position(const Wavepacket& wp) {
    detail::check_representation(wp, Representation::Momentum, "to_position");
    const Grid& g = wp.grid();
    const std::size_t n = g.size();
    std::vector<cplx> buf(n);
    for (std::size_t j = 0; j < n; ++j) buf[j] = wp.data()[j] * std::polar(1.0, g.k(j) * g.xi_min());
    fft::transform(buf, fft::Direction::Backward);
    const double scale = g.d_k() / std::sqrt(constants::two_pi);
    for (std::size_t i = 0; i < n; ++i) buf[i] *= (i % 2 == 0 ? scale : -scale);
    return Wavepacket(g, std::move(buf), Representation::Position, wp.k_center());
}

/// Multiplies each momentum amplitude by the phase of free drift over L_D,
/// exp(-i hbar dk^2 t / 2 gamma^3 m) with t = L_D / v0.
inline Wavepacket apply_chirp(const Wavepacket& wp, double drift_length, const ElectronParams& electron) {
    detail::check_representation(wp, Representation::Momentum, "apply_chirp");
    if (drift_length == 0.0) return wp;
    const double t = drift_length / electron.velocity();
    const double coef = -constants::hbar * t / (2.0 * electron.dispersion_mass());
    const Grid& g = wp.grid();
    std::vector<cplx> out(wp.data());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double k = g.k(j);
        out[j] *= std::polar(1.0, coef * k * k);
    }
    return Wavepacket(g, std::move(out), Representation::Momentum, wp.k_center());
}

/// Gaussian envelope in momentum space, optionally a two-component
/// superposition and pre-chirped, returned in momentum representation.
inline Wavepacket make_gaussian(const Grid& grid, const ElectronParams& electron, const LaserGratingParams& laser,
                                const WavepacketSpec& spec) {
    if (!(spec.delta_k > 0.0)) throw DomainError("wavepacket momentum width must be positive");
    const double sigma = spec.delta_k * laser.q;
    const double k_lo = grid.k_min() - 0.5 * grid.d_k();
    const double k_hi = grid.k_max() + 0.5 * grid.d_k();
    const double sigma_xi = 1.0 / (2.0 * sigma);

    auto check = [&](double centre) {
        const double tail_k = detail::gaussian_tail(centre, sigma, k_lo, k_hi);
        if (tail_k > 1e-12)
            throw NumericalError("grid momentum window [" + std::to_string(k_lo / laser.q) + ", " +
                                 std::to_string(k_hi / laser.q) + "] q leaves tail mass " + std::to_string(tail_k) +
                                 " of the component at " + std::to_string(centre / laser.q) + " q; refine d_xi");
        const double tail_x = detail::gaussian_tail(0.0, sigma_xi, grid.xi_min(), grid.xi_max());
        if (tail_x > 1e-12)
            throw NumericalError("grid domain [" + std::to_string(grid.xi_min()) + ", " +
                                 std::to_string(grid.xi_max()) + "] m leaves position tail mass " +
                                 std::to_string(tail_x) + "; widen the domain");
    };

    const double c1 = spec.dk_offset * laser.q;
    check(c1);
    std::optional<double> c2;
    cplx w2{0.0, 0.0};
    if (spec.superposition) {
        c2 = spec.superposition->dk_offset * laser.q;
        w2 = spec.superposition->weight;
        check(*c2);
    }

    const std::size_t n = grid.size();
    std::vector<cplx> amps(n);
    const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = grid.k(j);
        cplx a = std::exp(-(k - c1) * (k - c1) * inv4s2);
        if (c2) a += w2 * std::exp(-(k - *c2) * (k - *c2) * inv4s2);
        amps[j] = a;
    }
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    s *= grid.d_k();
    if (!(s > 0.0)) throw NumericalError("wavepacket components cancel exactly");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& a : amps) a *= inv;

    Wavepacket wp(grid, std::move(amps), Representation::Momentum, electron.k0);
    if (spec.chirp_drift != 0.0) wp = apply_chirp(wp, spec.chirp_drift, electron);
    return wp;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// First and second central moments of |amplitude|^2 along the native axis.
inline Moments moments(const Wavepacket& wp) {
    const auto axis = wp.axis();
    double w = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        const double p = std::norm(wp.data()[i]);
        w += p;
        m1 += p * axis[i];
    }
    Moments m;
    if (w == 0.0) return m;
    m.mean = m1 / w;
    double m2 = 0.0;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        const double d = axis[i] - m.mean;
        m2 += std::norm(wp.data()[i]) * d * d;
    }
    m.variance = m2 / w;
    return m;
}

}  // namespace feqo
