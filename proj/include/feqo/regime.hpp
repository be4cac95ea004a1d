#pragma once

// Diffraction-regime decision tree.  Every threshold comparison is appended to
// the trace in the order it was evaluated.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/physics.hpp"

namespace feqo {

enum class Regime { RamanNathPINEM, Bragg, UltrafastSternGerlach, AnomalousBragg, APINEM, DLA, Indeterminate };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::RamanNathPINEM: return "RamanNathPINEM";
        case Regime::Bragg: return "Bragg";
        case Regime::UltrafastSternGerlach: return "UltrafastSternGerlach";
        case Regime::AnomalousBragg: return "AnomalousBragg";
        case Regime::APINEM: return "APINEM";
        case Regime::DLA: return "DLA";
        case Regime::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

struct RegimeThresholds {
    double beta_fast = 0.5;
    double plane_wave_factor = 3.0;         // plane wave when size >= factor * beta lambda
    double point_particle_factor = 1.0 / 3.0;  // point particle when size <= factor * beta lambda
    double klein_cook_min = 1.0;            // Bragg needs Q >= this
    double anomalous_dk_over_q = 0.05;      // broader packets are anomalous
};

struct RegimeInputs {
    double beta = 0.0;
    double wavelength = 0.0;     // optical wavelength (m)
    double q = 0.0;              // rad/m
    double delta_k = 0.0;        // momentum std (rad/m)
    double chirp_drift = 0.0;    // L_D (m)
    double dispersion_mass = constants::electron_mass;  // kg
    bool has_gradient = false;
    double klein_cook_q = 0.0;
    double validity_ratio = 0.0;
};

struct TraceEntry {
    std::string quantity;
    double value = 0.0;
    std::string relation;  // ">=", "<=", ">", "<", or "info"
    double threshold = 0.0;
    bool holds = false;

    std::string str() const {
        char buf[256];
        if (relation == "info")
            std::snprintf(buf, sizeof buf, "%s = %.6g", quantity.c_str(), value);
        else
            std::snprintf(buf, sizeof buf, "%s = %.6g %s %.6g: %s", quantity.c_str(), value, relation.c_str(),
                          threshold, holds ? "yes" : "no");
        return buf;
    }
};

struct RegimeLabel {
    Regime regime = Regime::Indeterminate;
    std::vector<TraceEntry> trace;
    std::string note;  // set when inputs are inconsistent

    const char* name() const { return regime_name(regime); }
};

/// Gaussian position std after free drift over L_D, starting from the transform-limited size.
inline double chirped_size(double intrinsic_size, double chirp_drift, double beta, double dispersion_mass) {
    if (chirp_drift == 0.0) return intrinsic_size;
    const double t = std::abs(chirp_drift) / (beta * constants::speed_of_light);
    const double a = constants::hbar * t / (2.0 * dispersion_mass * intrinsic_size * intrinsic_size);
    return intrinsic_size * std::sqrt(1.0 + a * a);
}

inline RegimeLabel classify_regime(const RegimeInputs& in, const RegimeThresholds& th = {}) {
    RegimeLabel out;
    auto cmp = [&](const std::string& name, double v, const char* rel, double t) {
        const std::string r = rel;
        const bool h = r == ">=" ? v >= t : r == "<=" ? v <= t : r == ">" ? v > t : v < t;
        out.trace.push_back({name, v, r, t, h});
        return h;
    };
    auto info = [&](const std::string& name, double v) { out.trace.push_back({name, v, "info", 0.0, true}); };

    const bool sane = std::isfinite(in.beta) && in.beta > 0.0 && in.beta < 1.0 && std::isfinite(in.wavelength) &&
                      in.wavelength > 0.0 && std::isfinite(in.q) && in.q > 0.0 && std::isfinite(in.delta_k) &&
                      in.delta_k > 0.0 && std::isfinite(in.chirp_drift) && in.chirp_drift >= 0.0 &&
                      !std::isnan(in.klein_cook_q) && in.klein_cook_q >= 0.0 && in.dispersion_mass > 0.0 &&
                      th.point_particle_factor < th.plane_wave_factor;
    if (!sane) {
        out.note = "inputs outside the classifier domain (need 0 < beta < 1, positive wavelength, q and "
                   "delta_k, non-negative chirp and Q, ordered size factors)";
        info("beta", in.beta);
        info("delta_k_over_q", in.q > 0.0 ? in.delta_k / in.q : NAN);
        return out;
    }

    const double blam = in.beta * in.wavelength;
    const double size = 1.0 / (2.0 * in.delta_k);
    const double dk_q = in.delta_k / in.q;
    info("beta_lambda_m", blam);
    info("intrinsic_size_m", size);
    info("validity_ratio_r", in.validity_ratio);

    if (cmp("intrinsic_size/beta_lambda", size / blam, "<=", th.point_particle_factor)) {
        const double grown = chirped_size(size, in.chirp_drift, in.beta, in.dispersion_mass);
        if (cmp("chirped_size/beta_lambda", grown / blam, ">", 1.0)) {
            out.regime = Regime::APINEM;
        } else {
            out.regime = Regime::DLA;
        }
        return out;
    }
    cmp("intrinsic_size/beta_lambda", size / blam, ">=", th.plane_wave_factor);  // plane-wave vs intermediate
    if (cmp("beta", in.beta, ">=", th.beta_fast)) {
        out.regime = Regime::RamanNathPINEM;
        return out;
    }
    if (!cmp("klein_cook_Q", in.klein_cook_q, ">=", th.klein_cook_min)) {
        out.regime = Regime::RamanNathPINEM;
        return out;
    }
    if (cmp("delta_k/q", dk_q, ">", th.anomalous_dk_over_q)) {
        out.regime = Regime::AnomalousBragg;
        return out;
    }
    info("has_gradient", in.has_gradient ? 1.0 : 0.0);
    out.regime = in.has_gradient ? Regime::UltrafastSternGerlach : Regime::Bragg;
    return out;
}

}  // namespace feqo
