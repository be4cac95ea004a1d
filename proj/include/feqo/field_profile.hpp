#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"

namespace feqo {

/// Longitudinal field amplitude E0(xi) and carrier phase theta(xi) seen by the
/// envelope in the co-moving frame.
struct FieldProfile {
    enum class Kind { Uniform, LinearGradient, Tabulated };
    enum class Clamp { Hold, Extend };

    Kind kind = Kind::Uniform;
    double e0_central = 0.0;  // V/m

    // LinearGradient: E0 runs from e_lo at xi_lo to e_hi at xi_hi.
    double xi_lo = -100e-9;
    double xi_hi = 100e-9;
    double e_lo = 0.0;
    double e_hi = 0.0;
    Clamp clamp = Clamp::Hold;

    // Tabulated: (xi, E0) knots, ascending in xi, interpolated linearly and held at the ends.
    std::vector<std::pair<double, double>> table;

    double theta = constants::pi / 2.0;
    // Optional (xi, theta) knots overriding the constant phase.
    std::vector<std::pair<double, double>> theta_table;

    // Velocity of the profile relative to the co-moving frame.  Zero keeps the
    // Hamiltonian static; -v0 pins the profile to the laboratory frame.
    double drift_velocity = 0.0;

    static FieldProfile uniform(double e0, double theta = constants::pi / 2.0) {
        FieldProfile p;
        p.kind = Kind::Uniform;
        p.e0_central = e0;
        p.theta = theta;
        return p;
    }

    static FieldProfile linear_gradient(double xi_lo, double e_lo, double xi_hi, double e_hi,
                                        double theta = constants::pi / 2.0) {
        FieldProfile p;
        p.kind = Kind::LinearGradient;
        p.xi_lo = xi_lo;
        p.xi_hi = xi_hi;
        p.e_lo = e_lo;
        p.e_hi = e_hi;
        p.e0_central = 0.5 * (e_lo + e_hi);
        p.theta = theta;
        return p;
    }

    bool time_dependent() const noexcept { return drift_velocity != 0.0 && kind != Kind::Uniform; }

    bool has_gradient() const noexcept {
        switch (kind) {
            case Kind::Uniform: return false;
            case Kind::LinearGradient: return e_lo != e_hi;
            case Kind::Tabulated:
                for (std::size_t i = 1; i < table.size(); ++i)
                    if (table[i].second != table[0].second) return true;
                return false;
        }
        return false;
    }

    void validate() const {
        auto fail = [](const std::string& s) { throw DomainError("field profile: " + s); };
        if (!std::isfinite(theta)) fail("theta must be finite");
        switch (kind) {
            case Kind::Uniform:
                if (!(e0_central >= 0.0)) fail("amplitude must be non-negative");
                break;
            case Kind::LinearGradient:
                if (!(xi_hi > xi_lo)) fail("gradient window needs xi_hi > xi_lo");
                if (!(e_lo >= 0.0 && e_hi >= 0.0)) fail("gradient end amplitudes must be non-negative");
                break;
            case Kind::Tabulated:
                if (table.empty()) fail("tabulated profile has no knots");
                for (std::size_t i = 0; i < table.size(); ++i) {
                    if (!(table[i].second >= 0.0)) fail("tabulated amplitudes must be non-negative");
                    if (i > 0 && !(table[i].first > table[i - 1].first)) fail("tabulated knots must ascend in xi");
                }
                break;
        }
        for (std::size_t i = 1; i < theta_table.size(); ++i)
            if (!(theta_table[i].first > theta_table[i - 1].first)) fail("theta knots must ascend in xi");
    }
};

namespace detail {

inline double interpolate_held(const std::vector<std::pair<double, double>>& knots, double x) {
    if (x <= knots.front().first) return knots.front().second;
    if (x >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

inline double slope_held(const std::vector<std::pair<double, double>>& knots, double x) {
    if (knots.size() < 2 || x <= knots.front().first || x >= knots.back().first) return 0.0;
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return (y1 - y0) / (x1 - x0);
}

}  // namespace detail

/// Field amplitude (V/m) at co-moving coordinate xi and time t.
inline double field_at(const FieldProfile& p, double xi, double t = 0.0) {
    const double x = xi - p.drift_velocity * t;
    switch (p.kind) {
        case FieldProfile::Kind::Uniform: return p.e0_central;
        case FieldProfile::Kind::LinearGradient: {
            const double slope = (p.e_hi - p.e_lo) / (p.xi_hi - p.xi_lo);
            if (p.clamp == FieldProfile::Clamp::Hold) {
                if (x <= p.xi_lo) return p.e_lo;
                if (x >= p.xi_hi) return p.e_hi;
            }
            return std::max(0.0, p.e_lo + slope * (x - p.xi_lo));
        }
        case FieldProfile::Kind::Tabulated: return detail::interpolate_held(p.table, x);
    }
    return 0.0;
}

/// dE0/dxi (V/m^2); zero wherever the profile is held constant.
inline double field_gradient_at(const FieldProfile& p, double xi, double t = 0.0) {
    const double x = xi - p.drift_velocity * t;
    switch (p.kind) {
        case FieldProfile::Kind::Uniform: return 0.0;
        case FieldProfile::Kind::LinearGradient: {
            const double slope = (p.e_hi - p.e_lo) / (p.xi_hi - p.xi_lo);
            if (p.clamp == FieldProfile::Clamp::Hold && (x < p.xi_lo || x > p.xi_hi)) return 0.0;
            if (p.e_lo + slope * (x - p.xi_lo) < 0.0) return 0.0;
            return slope;
        }
        case FieldProfile::Kind::Tabulated: return detail::slope_held(p.table, x);
    }
    return 0.0;
}

inline double theta_at(const FieldProfile& p, double xi, double t = 0.0) {
    if (p.theta_table.empty()) return p.theta;
    return detail::interpolate_held(p.theta_table, xi - p.drift_velocity * t);
}

}  // namespace feqo
