#pragma once

// Closed-form parameters of a slow electron co-propagating with a
// phase-matched travelling grating field.  SI units at every boundary.

#include <cmath>
#include <limits>
#include <string>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"

namespace feqo {

struct ElectronParams {
    double kinetic_energy_ev = 0.0;
    double beta = 0.0;   // v0 / c
    double gamma = 1.0;
    double k0 = 0.0;     // rad/m, central wavenumber p0 / hbar
    double p0 = 0.0;     // kg m/s

    double velocity() const noexcept { return beta * constants::speed_of_light; }
    double kinetic_energy_joule() const noexcept {
        return kinetic_energy_ev * constants::joules_per_ev;
    }
    /// Longitudinal mass gamma^3 m entering the quadratic dispersion.
    double dispersion_mass() const noexcept {
        return gamma * gamma * gamma * constants::electron_mass;
    }
};

struct LaserGratingParams {
    double photon_energy_ev = 0.0;
    double omega_L = 0.0;         // rad/s
    double grating_period = 0.0;  // m
    double q = 0.0;               // rad/m
    double e0_central = 0.0;      // V/m
    double theta = 0.0;           // rad

    double wavelength() const noexcept { return constants::two_pi * constants::speed_of_light / omega_L; }
    double phase_velocity() const noexcept { return omega_L / q; }
};

struct DerivedCouplings {
    double rabi_omega = 0.0;     // J
    double alpha0 = 0.0;         // 1/m
    double alpha1 = 0.0;         // dimensionless
    double alpha2 = 0.0;         // m
    double recoil_energy = 0.0;  // J, hbar^2 q^2 / 2m
    double klein_cook_q = 0.0;
};

struct ValidityMargin {
    double ratio = 0.0;  // |Omega| / (hbar^2 q^2 / 8m)
    bool valid = true;   // ratio < 1
};

/// Relativistic kinematics of an electron with the given kinetic energy.
inline ElectronParams electron_from_energy(double kinetic_energy_ev) {
    if (!(kinetic_energy_ev > 0.0) || !std::isfinite(kinetic_energy_ev))
        throw DomainError("electron kinetic energy must be positive, got " +
                          std::to_string(kinetic_energy_ev) + " eV");
    using namespace constants;
    const double x = kinetic_energy_ev * joules_per_ev / electron_rest_energy;  // gamma - 1
    ElectronParams e;
    e.kinetic_energy_ev = kinetic_energy_ev;
    e.gamma = 1.0 + x;
    // gamma^2 - 1 = x (x + 2), avoids cancellation for slow electrons
    e.beta = std::sqrt(x * (x + 2.0)) / e.gamma;
    e.p0 = e.gamma * electron_mass * e.beta * speed_of_light;
    e.k0 = e.p0 / hbar;
    return e;
}

/// Kinetic energy (eV) of an electron moving with velocity beta c.
inline double kinetic_energy_from_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
    const double b2 = beta * beta;
    // gamma - 1 = b2 / (sqrt(1 - b2) (1 + sqrt(1 - b2)))
    const double s = std::sqrt(1.0 - b2);
    return b2 / (s * (1.0 + s)) * constants::electron_rest_energy / constants::joules_per_ev;
}

inline LaserGratingParams make_laser(double photon_energy_ev, double grating_period, double e0_central,
                                     double theta = constants::pi / 2.0) {
    if (!(photon_energy_ev > 0.0)) throw DomainError("photon energy must be positive");
    if (!(grating_period > 0.0)) throw DomainError("grating period must be positive");
    if (!(e0_central >= 0.0)) throw DomainError("field amplitude must be non-negative");
    LaserGratingParams l;
    l.photon_energy_ev = photon_energy_ev;
    l.omega_L = photon_energy_ev * constants::joules_per_ev / constants::hbar;
    l.grating_period = grating_period;
    l.q = constants::two_pi / grating_period;
    l.e0_central = e0_central;
    l.theta = theta;
    return l;
}

/// Grating period that makes the optical phase velocity omega_L / q equal to
/// the electron group velocity.
inline double phase_matched_period(const ElectronParams& electron, double photon_energy_ev) {
    if (!(electron.beta > 0.0)) throw DomainError("electron must be moving");
    if (!(photon_energy_ev > 0.0)) throw DomainError("photon energy must be positive");
    const double omega = photon_energy_ev * constants::joules_per_ev / constants::hbar;
    return constants::two_pi * electron.velocity() / omega;
}

/// Relative mismatch (v_p - v_g) / v_g between grating phase velocity and electron velocity.
inline double phase_velocity_mismatch(const ElectronParams& electron, const LaserGratingParams& laser) {
    return (laser.phase_velocity() - electron.velocity()) / electron.velocity();
}

/// Two-sideband coupling e E0 hbar k0 / (2 m omega_L), in joules.
inline double rabi_frequency(const ElectronParams& electron, const LaserGratingParams& laser,
                             double e0_local) {
    if (!(e0_local >= 0.0)) throw DomainError("local field amplitude must be non-negative");
    using namespace constants;
    return elementary_charge * e0_local * hbar * electron.k0 / (2.0 * electron_mass * laser.omega_L);
}

inline double recoil_energy(const LaserGratingParams& laser) {
    using namespace constants;
    return hbar * hbar * laser.q * laser.q / (2.0 * electron_mass);
}

/// Klein-Cook parameter hbar^2 q^2 / (4 m |Omega|).  Infinite when the coupling vanishes.
inline double klein_cook(double recoil, double rabi_omega) {
    const double w = std::abs(rabi_omega);
    if (w == 0.0) return std::numeric_limits<double>::infinity();
    return recoil / (2.0 * w);
}

inline double klein_cook(const DerivedCouplings& d) { return klein_cook(d.recoil_energy, d.rabi_omega); }

/// Coefficients of the co-moving envelope equation, all evaluated at e0_local.
inline DerivedCouplings tdse_coefficients(const ElectronParams& electron, const LaserGratingParams& laser,
                                          double e0_local) {
    using namespace constants;
    DerivedCouplings d;
    d.rabi_omega = rabi_frequency(electron, laser, e0_local);
    d.alpha0 = elementary_charge * e0_local * electron.beta / (hbar * laser.omega_L);
    d.alpha1 = elementary_charge * e0_local / (electron.gamma * electron_mass * speed_of_light * laser.omega_L);
    d.alpha2 = hbar / (2.0 * electron.gamma * electron.gamma * electron.gamma * electron_mass * speed_of_light);
    d.recoil_energy = recoil_energy(laser);
    d.klein_cook_q = klein_cook(d.recoil_energy, d.rabi_omega);
    return d;
}

inline DerivedCouplings tdse_coefficients(const ElectronParams& electron, const LaserGratingParams& laser) {
    return tdse_coefficients(electron, laser, laser.e0_central);
}

/// |Omega| against the sideband-isolation bound hbar^2 q^2 / 8m.
inline ValidityMargin two_level_validity(const DerivedCouplings& d) {
    ValidityMargin m;
    const double bound = d.recoil_energy / 4.0;
    m.ratio = bound > 0.0 ? std::abs(d.rabi_omega) / bound : std::numeric_limits<double>::infinity();
    m.valid = m.ratio < 1.0;
    return m;
}

}  // namespace feqo
