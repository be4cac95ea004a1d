#pragma once

// Reduced model on the synthetic momentum lattice.  Each delta-k bin b carries
// amplitudes c_j on sidebands at offsets s_j = ((n-1)/2 - j) q (descending, so
// c_0 sits at the top sideband; for n = 2 that is +q/2).  Bins evolve
// independently:
//   i hbar dc_j/dt = (E(s_j + dk_b + K_b) - E_ref) c_j - Omega* c_{j+1} - Omega c_{j-1}
// with E(k) = hbar^2 k^2 / 2M.  K_b is an Ehrenfest momentum shift that is only
// non-zero when a field gradient is supplied.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"
#include "feqo/field_profile.hpp"
#include "feqo/physics.hpp"

namespace feqo {

struct SpinorLattice {
    using cplx = std::complex<double>;

    double q = 0.0;                 // rad/m
    std::vector<double> offsets;    // s_j, rad/m, descending
    std::vector<double> dk_axis;    // rad/m
    std::vector<double> weights;    // quadrature weight of each bin (rad/m)
    std::vector<cplx> amplitudes;   // [sideband * n_bins + bin]
    std::vector<double> shift;      // Ehrenfest K_b, rad/m

    std::size_t n_sidebands() const noexcept { return offsets.size(); }
    std::size_t n_bins() const noexcept { return dk_axis.size(); }
    cplx& at(std::size_t j, std::size_t b) { return amplitudes[j * n_bins() + b]; }
    const cplx& at(std::size_t j, std::size_t b) const { return amplitudes[j * n_bins() + b]; }

    /// Index of the sideband whose offset is nearest to dk (rad/m).
    std::size_t sideband_index(double dk) const {
        std::size_t best = 0;
        for (std::size_t j = 1; j < offsets.size(); ++j)
            if (std::abs(offsets[j] - dk) < std::abs(offsets[best] - dk)) best = j;
        return best;
    }

    double norm() const {
        double s = 0.0;
        for (std::size_t j = 0; j < n_sidebands(); ++j)
            for (std::size_t b = 0; b < n_bins(); ++b) s += std::norm(at(j, b)) * weights[b];
        return s;
    }

    std::vector<double> populations() const {
        std::vector<double> p(n_sidebands(), 0.0);
        for (std::size_t j = 0; j < n_sidebands(); ++j)
            for (std::size_t b = 0; b < n_bins(); ++b) p[j] += std::norm(at(j, b)) * weights[b];
        return p;
    }

    /// Population-weighted mean Ehrenfest shift (rad/m).
    double mean_shift() const {
        double s = 0.0, w = 0.0;
        for (std::size_t b = 0; b < n_bins(); ++b) {
            double pb = 0.0;
            for (std::size_t j = 0; j < n_sidebands(); ++j) pb += std::norm(at(j, b));
            s += pb * weights[b] * shift[b];
            w += pb * weights[b];
        }
        return w > 0.0 ? s / w : 0.0;
    }
};

/// Sideband offsets ((n-1)/2 - j) q, j = 0..n-1.
inline std::vector<double> sideband_offsets(std::size_t n_sidebands, double q) {
    if (n_sidebands < 2) throw DomainError("lattice needs at least two sidebands");
    std::vector<double> s(n_sidebands);
    for (std::size_t j = 0; j < n_sidebands; ++j)
        s[j] = (0.5 * static_cast<double>(n_sidebands - 1) - static_cast<double>(j)) * q;
    return s;
}

/// Empty lattice with a uniform bin axis of n_bins points over [-half_span, half_span].
inline SpinorLattice make_lattice(std::size_t n_sidebands, double q, std::size_t n_bins, double half_span) {
    if (!(q > 0.0)) throw DomainError("lattice recoil q must be positive");
    if (n_bins == 0) throw DomainError("lattice needs at least one delta-k bin");
    SpinorLattice l;
    l.q = q;
    l.offsets = sideband_offsets(n_sidebands, q);
    l.dk_axis.resize(n_bins);
    l.weights.assign(n_bins, 1.0);
    if (n_bins == 1) {
        l.dk_axis[0] = 0.0;
    } else {
        const double h = 2.0 * half_span / static_cast<double>(n_bins - 1);
        for (std::size_t b = 0; b < n_bins; ++b) {
            l.dk_axis[b] = -half_span + h * static_cast<double>(b);
            l.weights[b] = h;
        }
    }
    l.amplitudes.assign(n_sidebands * n_bins, {});
    l.shift.assign(n_bins, 0.0);
    return l;
}

struct LatticeComponent {
    double center = 0.5;               // units of q; must coincide with a sideband offset
    std::complex<double> weight{1.0, 0.0};
};

/// Gaussian spectrum of std sigma (rad/m) placed on the listed sidebands and normalised.
inline SpinorLattice gaussian_lattice(std::size_t n_sidebands, double q, double sigma,
                                      const std::vector<LatticeComponent>& components, std::size_t n_bins = 241,
                                      double span_sigmas = 6.0) {
    if (!(sigma >= 0.0)) throw DomainError("lattice bin width must be non-negative");
    SpinorLattice l = make_lattice(n_sidebands, q, sigma > 0.0 ? n_bins : 1, span_sigmas * sigma);
    for (const auto& c : components) {
        const std::size_t j = l.sideband_index(c.center * q);
        if (std::abs(l.offsets[j] - c.center * q) > 1e-9 * q)
            throw DomainError("component centre " + std::to_string(c.center) + " q is not on the lattice");
        for (std::size_t b = 0; b < l.n_bins(); ++b) {
            const double g =
                sigma > 0.0 ? std::exp(-l.dk_axis[b] * l.dk_axis[b] / (4.0 * sigma * sigma)) : 1.0;
            l.at(j, b) += c.weight * g;
        }
    }
    const double n = l.norm();
    if (!(n > 0.0)) throw DomainError("lattice components cancel exactly");
    for (auto& a : l.amplitudes) a /= std::sqrt(n);
    return l;
}

struct DiracParams {
    std::complex<double> omega{};   // J; coupling into the upper sideband is -conj(omega)
    double q = 0.0;                 // rad/m
    double mass_eff = constants::electron_mass;  // kg
    // Optional hbar q / 4 style correction: the coupling between kappa and
    // kappa - q is scaled by (1 + (kappa - q/2) / k0).  Off when k0 = 0.
    bool recoil_correction = false;
    double k0 = 0.0;
};

/// Complex coupling for a grating phase theta; theta = pi/2 gives real Omega (sigma_x coupling).
inline std::complex<double> coupling_from_theta(double magnitude, double theta) {
    return std::polar(magnitude, constants::pi / 2.0 - theta);
}

inline DiracParams make_dirac_params(const ElectronParams& electron, const LaserGratingParams& laser,
                                     double e0, double theta) {
    DiracParams p;
    p.omega = coupling_from_theta(rabi_frequency(electron, laser, e0), theta);
    p.q = laser.q;
    p.mass_eff = electron.dispersion_mass();
    p.k0 = electron.k0;
    return p;
}

/// Field along the classical co-moving trajectory z(t) = z0 + v t.
struct TrajectoryDrive {
    std::function<double(double z)> magnitude;  // |Omega|, J
    std::function<double(double z)> gradient;   // d|Omega|/dz, J/m
    double z0 = 0.0;
    double velocity = 0.0;
    double theta = constants::pi / 2.0;

    double position(double t) const noexcept { return z0 + velocity * t; }
};

inline TrajectoryDrive drive_from_profile(const FieldProfile& profile, const ElectronParams& electron,
                                          const LaserGratingParams& laser, double z0 = 0.0, double velocity = 0.0) {
    const double per_field = rabi_frequency(electron, laser, 1.0);
    TrajectoryDrive d;
    d.magnitude = [profile, per_field](double z) { return per_field * field_at(profile, z); };
    d.gradient = [profile, per_field](double z) { return per_field * field_gradient_at(profile, z); };
    d.z0 = z0;
    d.velocity = velocity;
    d.theta = profile.theta;
    return d;
}

namespace detail {

inline double onsite_energy(const DiracParams& p, double k) {
    return constants::hbar * constants::hbar * k * k / (2.0 * p.mass_eff);
}

// Coupling scale of the pair (kappa_upper, kappa_upper - q).
inline double coupling_scale(const DiracParams& p, double kappa_upper) {
    if (!p.recoil_correction || p.k0 == 0.0) return 1.0;
    return 1.0 + (kappa_upper - 0.5 * p.q) / p.k0;
}

}  // namespace detail

/// d/dt of every amplitude (and of the Ehrenfest shifts) at time t.
inline SpinorLattice coupled_mode_rhs(const SpinorLattice& state, const DiracParams& params,
                                      const TrajectoryDrive* drive = nullptr, double t = 0.0) {
    using cplx = std::complex<double>;
    const std::size_t n = state.n_sidebands(), nb = state.n_bins();
    std::complex<double> omega = params.omega;
    double grad = 0.0;
    if (drive) {
        const double z = drive->position(t);
        omega = coupling_from_theta(drive->magnitude(z), drive->theta);
        grad = drive->gradient(z);
    }
    const double mag = std::abs(omega);
    const cplx unit = mag > 0.0 ? omega / mag : cplx{1.0, 0.0};
    const cplx minus_i_over_hbar{0.0, -1.0 / constants::hbar};

    SpinorLattice d = state;
    std::vector<double> e(n);
    for (std::size_t b = 0; b < nb; ++b) {
        const double kb = state.dk_axis[b] + state.shift[b];
        double ref = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = detail::onsite_energy(params, state.offsets[j] + kb);
            ref += e[j];
        }
        ref /= static_cast<double>(n);
        double pb = 0.0;
        cplx x{};
        for (std::size_t j = 0; j < n; ++j) {
            cplx h = (e[j] - ref) * state.at(j, b);
            if (j + 1 < n) {
                const double s = detail::coupling_scale(params, state.offsets[j] + kb);
                h -= s * std::conj(omega) * state.at(j + 1, b);
                x += std::conj(state.at(j, b)) * s * std::conj(unit) * state.at(j + 1, b);
            }
            if (j > 0) h -= detail::coupling_scale(params, state.offsets[j - 1] + kb) * omega * state.at(j - 1, b);
            d.at(j, b) = minus_i_over_hbar * h;
            pb += std::norm(state.at(j, b));
        }
        // Force <-dH/dz> = grad|Omega| <X>, X = sum_j (u* |j><j+1| + h.c.).
        d.shift[b] = (grad != 0.0 && pb > 0.0) ? grad * 2.0 * x.real() / (constants::hbar * pb) : 0.0;
    }
    return d;
}

struct DiracTrajectory {
    std::vector<double> times;                     // s
    std::vector<std::vector<double>> populations;  // [snapshot][sideband]
    std::vector<double> mean_shift;                // rad/m
    std::vector<SpinorLattice> states;             // only when requested
    std::size_t n_steps = 0;
    double max_norm_drift = 0.0;
};

struct DiracEvolveOptions {
    std::size_t n_steps = 0;          // 0 = choose from the norm tolerance
    std::size_t record_every = 1;
    bool keep_states = false;
    double norm_tolerance = 1e-10;
};

/// Largest |eigenvalue| (rad/s) any bin can reach, used for the RK4 step rule.
inline double lattice_frequency_scale(const SpinorLattice& s, const DiracParams& p, const TrajectoryDrive* drive,
                                      double total_time) {
    double mag = std::abs(p.omega);
    if (drive) {
        for (int i = 0; i <= 64; ++i) mag = std::max(mag, drive->magnitude(drive->position(total_time * i / 64.0)));
    }
    double spread = 0.0;
    for (std::size_t b = 0; b < s.n_bins(); ++b) {
        const double kb = s.dk_axis[b] + s.shift[b];
        double lo = INFINITY, hi = -INFINITY;
        for (double off : s.offsets) {
            const double e = detail::onsite_energy(p, off + kb);
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
        spread = std::max(spread, hi - lo);
    }
    const double corr = p.recoil_correction && p.k0 > 0.0 ? 1.0 + s.q * s.n_sidebands() / p.k0 : 1.0;
    return (0.5 * spread + 2.0 * mag * corr) / constants::hbar;
}

/// Fixed-step classical RK4 integration.  Throws SolverAbort if the norm drifts
/// beyond tolerance, which means the step is too large.
inline DiracTrajectory dirac_evolve(const SpinorLattice& initial, const DiracParams& params, double total_time,
                                    const DiracEvolveOptions& opt = {}, const TrajectoryDrive* drive = nullptr) {
    if (!(total_time >= 0.0)) throw DomainError("evolution time must be non-negative");
    if (initial.amplitudes.size() != initial.n_sidebands() * initial.n_bins())
        throw DomainError("lattice amplitude matrix has the wrong size");
    std::size_t steps = opt.n_steps;
    if (steps == 0) {
        const double lam = lattice_frequency_scale(initial, params, drive, total_time);
        // Per-step norm loss of RK4 on an oscillator is z^6 / 72 (z = lambda dt).
        const double budget = 0.1 * opt.norm_tolerance;
        const double z = std::min(0.5, std::pow(72.0 * budget / std::max(lam * total_time, 1e-300), 0.2));
        steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(lam * total_time / z)));
    }
    const double dt = total_time / static_cast<double>(steps);
    const double n0 = initial.norm();

    DiracTrajectory tr;
    tr.n_steps = steps;
    auto record = [&](double t, const SpinorLattice& s) {
        tr.times.push_back(t);
        tr.populations.push_back(s.populations());
        tr.mean_shift.push_back(s.mean_shift());
        if (opt.keep_states) tr.states.push_back(s);
    };

    SpinorLattice y = initial;
    record(0.0, y);
    auto axpy = [](const SpinorLattice& a, double h, const SpinorLattice& d) {
        SpinorLattice r = a;
        for (std::size_t i = 0; i < r.amplitudes.size(); ++i) r.amplitudes[i] += h * d.amplitudes[i];
        for (std::size_t i = 0; i < r.shift.size(); ++i) r.shift[i] += h * d.shift[i];
        return r;
    };
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s - 1) * dt;
        const SpinorLattice k1 = coupled_mode_rhs(y, params, drive, t);
        const SpinorLattice k2 = coupled_mode_rhs(axpy(y, 0.5 * dt, k1), params, drive, t + 0.5 * dt);
        const SpinorLattice k3 = coupled_mode_rhs(axpy(y, 0.5 * dt, k2), params, drive, t + 0.5 * dt);
        const SpinorLattice k4 = coupled_mode_rhs(axpy(y, dt, k3), params, drive, t + dt);
        for (std::size_t i = 0; i < y.amplitudes.size(); ++i)
            y.amplitudes[i] +=
                dt / 6.0 * (k1.amplitudes[i] + 2.0 * k2.amplitudes[i] + 2.0 * k3.amplitudes[i] + k4.amplitudes[i]);
        for (std::size_t i = 0; i < y.shift.size(); ++i)
            y.shift[i] += dt / 6.0 * (k1.shift[i] + 2.0 * k2.shift[i] + 2.0 * k3.shift[i] + k4.shift[i]);
        const double drift = std::abs(y.norm() - n0);
        tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
        if (drift > opt.norm_tolerance)
            throw SolverAbort("lattice norm drift " + std::to_string(drift) + " at step " + std::to_string(s) +
                              "; use more than " + std::to_string(steps) + " steps");
        if (s == steps || (opt.record_every > 0 && s % opt.record_every == 0))
            record(static_cast<double>(s) * dt, y);
    }
    return tr;
}

/// (E+, E-) of the two-level Hamiltonian without its scalar part, in J.
inline std::pair<double, double> energy_gap(double dk, const DiracParams& p) {
    const double detuning = constants::hbar * constants::hbar * p.q * dk / (2.0 * p.mass_eff);
    const double e = std::hypot(std::abs(p.omega), detuning);
    return {e, -e};
}

/// Full population revival period pi hbar / E+ (s).
inline double rabi_period(double dk, const DiracParams& p) {
    const double e = energy_gap(dk, p).first;
    if (!(e > 0.0)) throw DomainError("Rabi period undefined for a vanishing gap");
    return constants::pi * constants::hbar / e;
}

/// Probability of finding the two-level system in -q/2 at time t after starting in +q/2.
inline double two_level_transfer(double dk, const DiracParams& p, double t) {
    const double e = energy_gap(dk, p).first;
    if (e == 0.0) return 0.0;
    const double s = std::sin(e * t / constants::hbar);
    return std::norm(p.omega) / (e * e) * s * s;
}

}  // namespace feqo
