#pragma once

// Built-in experiment presets.

#include <string>
#include <utility>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"
#include "feqo/experiment.hpp"

namespace feqo {

namespace detail {

inline ExperimentParams slow_base() {
    ExperimentParams p;
    p.kinetic_energy_ev = 100.0;
    p.photon_energy_ev = 6.2;
    p.period_nm = 4.0;
    p.e0_v_per_m = 1e8;
    p.theta_rad = constants::pi / 2.0;
    p.delta_k_over_q = 0.02;
    p.dk_offset_over_q = 0.5;
    p.t_total_ps = 25.0;
    return p;
}

inline GradientSpec standard_gradient() {
    GradientSpec g;
    g.enabled = true;
    g.xi_lo_nm = -100.0;
    g.xi_hi_nm = 100.0;
    g.e_lo_v_per_m = 0.0;
    g.e_hi_v_per_m = 2e8;
    return g;
}

inline ExperimentParams broadband(double delta_k_over_q, double theta) {
    ExperimentParams p = slow_base();
    p.delta_k_over_q = delta_k_over_q;
    p.dk_offset_over_q = 0.0;
    p.e0_v_per_m = 1e9;
    p.theta_rad = theta;
    p.t_total_ps = 0.14;
    return p;
}

}  // namespace detail

struct PresetInfo {
    std::string name;
    std::string summary;
};

inline const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> c{
        {"fig2a", "Bragg Rabi oscillation: 100 eV, 6.2 eV photons, 4 nm grating, uniform 1e8 V/m, dk = 0.02q at +q/2, 25 ps"},
        {"fig2c", "as fig2a with a 0 -> 2e8 V/m gradient across +-100 nm, initial pseudospin |+>"},
        {"fig2d", "as fig2c, initial state at +q/2"},
        {"fig3", "broad sideband (dk = 0.15q), gradient on, 25.9 ps"},
        {"s1_on", "same as fig3"},
        {"s1_off", "as fig3 with the gradient off"},
        {"s2", "beta = 0.05, phase-matched grating, dk = 0.05q, 1e8 V/m, 0.52 ps"},
        {"s3", "alias of s3_minus_pi"},
        {"s3_minus_pi", "point-particle packet dk = 1.5q at 0, 1e9 V/m, 0.14 ps, theta = -pi"},
        {"s3_plus_half_pi", "as s3_minus_pi with theta = +pi/2"},
        {"s3_minus_half_pi", "as s3_minus_pi with theta = -pi/2"},
        {"s4", "pre-chirped packet dk = 1.2q at 0, L_D = 10 cm, 1e9 V/m, 0.14 ps"},
    };
    return c;
}

inline ExperimentParams preset(const std::string& name) {
    using detail::broadband;
    using detail::slow_base;
    using detail::standard_gradient;
    constexpr double pi = constants::pi;
    if (name == "fig2a") return slow_base();
    if (name == "fig2c" || name == "fig2d") {
        ExperimentParams p = slow_base();
        p.gradient = standard_gradient();
        if (name == "fig2c") {
            p.superposition_dk_offset_over_q = -0.5;
            p.superposition_weight_re = 1.0;
            p.superposition_weight_im = 0.0;
        }
        return p;
    }
    if (name == "fig3" || name == "s1_on" || name == "s1_off") {
        ExperimentParams p = slow_base();
        p.delta_k_over_q = 0.15;
        p.t_total_ps = 25.9;
        if (name != "s1_off") p.gradient = standard_gradient();
        return p;
    }
    if (name == "s2") {
        ExperimentParams p = slow_base();
        p.kinetic_energy_ev = kinetic_energy_from_beta(0.05);
        p.period_nm.reset();
        p.delta_k_over_q = 0.05;
        p.t_total_ps = 0.52;
        return p;
    }
    if (name == "s3" || name == "s3_minus_pi") return broadband(1.5, -pi);
    if (name == "s3_plus_half_pi") return broadband(1.5, pi / 2.0);
    if (name == "s3_minus_half_pi") return broadband(1.5, -pi / 2.0);
    if (name == "s4") {
        ExperimentParams p = broadband(1.2, pi / 2.0);
        p.chirp_ld_cm = 10.0;
        return p;
    }
    std::string known;
    for (const auto& i : preset_catalog()) known += (known.empty() ? "" : ", ") + i.name;
    throw ValidationError({"unknown preset '" + name + "' (known: " + known + ")"});
}

}  // namespace feqo
