#pragma once

// Finite-difference envelope propagator in the co-moving frame.
//
// Units: lengths in metres, time as tau = c t (metres), Hamiltonian in 1/m
// (energy / hbar c).  Row i of the discretised operator couples chi_i to its
// neighbours through
//   diag  = 2 a2/dxi^2 - (a1/dxi) cos(phi) - a0 sin(phi)
//   upper = -a2/dxi^2 + (a1 / 2dxi) exp(+i phi)     (times chi_{i+1})
//   lower = -a2/dxi^2 + (a1 / 2dxi) exp(-i phi)     (times chi_{i-1})
// with phi = q xi_i + theta(xi_i) and a0, a1 taken from the local amplitude
// E0(xi_i).  The optional drift term -+ i beta / 2dxi reproduces the
// laboratory-velocity advection; it vanishes in the true co-moving frame and
// is off by default.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#if defined(__SSE3__) || defined(__x86_64__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#define FEQO_HAVE_MXCSR 1
#endif

#include "feqo/errors.hpp"
#include "feqo/field_profile.hpp"
#include "feqo/physics.hpp"
#include "feqo/tridiagonal.hpp"
#include "feqo/wavepacket.hpp"

namespace feqo {

enum class Boundary { Periodic, Dirichlet };

/// Flushes subnormals to zero on this thread for its lifetime.  Gaussian tails
/// underflow into the subnormal range and would otherwise slow every step
/// several-fold; values that small are far below any reported quantity.
class FlushDenormalsGuard {
public:
    FlushDenormalsGuard() {
#ifdef FEQO_HAVE_MXCSR
        saved_ = _mm_getcsr();
        _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
        _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
    }
    ~FlushDenormalsGuard() {
#ifdef FEQO_HAVE_MXCSR
        _mm_setcsr(saved_);
#endif
    }
    FlushDenormalsGuard(const FlushDenormalsGuard&) = delete;
    FlushDenormalsGuard& operator=(const FlushDenormalsGuard&) = delete;

private:
    unsigned saved_ = 0;
};

struct TridiagonalHamiltonian {
    std::vector<cplx> diag, upper, lower;
    double time_tau = 0.0;
    bool periodic = true;

    std::size_t size() const noexcept { return diag.size(); }

    /// out = H v.
    void apply(std::span<const cplx> v, std::span<cplx> out) const {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = diag[i] * v[i];
            if (i + 1 < n) s += upper[i] * v[i + 1];
            else if (periodic) s += upper[i] * v[0];
            if (i > 0) s += lower[i] * v[i - 1];
            else if (periodic) s += lower[i] * v[n - 1];
            out[i] = s;
        }
    }

    /// Replaces each coupled pair (upper[i], lower[i+1]) by its Hermitian average.
    void symmetrize() {
        const std::size_t n = size();
        const std::size_t pairs = periodic ? n : n - 1;
        for (std::size_t i = 0; i < pairs; ++i) {
            const std::size_t j = (i + 1) % n;
            const cplx h = 0.5 * (upper[i] + std::conj(lower[j]));
            upper[i] = h;
            lower[j] = std::conj(h);
        }
        for (auto& d : diag) d = cplx{d.real(), 0.0};
    }

    /// Largest deviation from Hermiticity over all coupled pairs.
    double hermiticity_defect() const {
        const std::size_t n = size();
        const std::size_t pairs = periodic ? n : n - 1;
        double worst = 0.0;
        for (std::size_t i = 0; i < pairs; ++i)
            worst = std::max(worst, std::abs(upper[i] - std::conj(lower[(i + 1) % n])));
        for (const auto& d : diag) worst = std::max(worst, std::abs(d.imag()));
        return worst;
    }
};

struct AssemblyOptions {
    Boundary boundary = Boundary::Periodic;
    bool symmetrize = true;
    bool comoving_drift = false;
};

inline TridiagonalHamiltonian assemble_hamiltonian(const Grid& grid, const ElectronParams& electron,
                                                   const LaserGratingParams& laser, const FieldProfile& profile,
                                                   double tau_c, const AssemblyOptions& opt = {}) {
    const std::size_t n = grid.size();
    const double dx = grid.d_xi();
    const double t = tau_c / constants::speed_of_light;
    const DerivedCouplings unit = tdse_coefficients(electron, laser, 1.0);  // per V/m
    const double kin = unit.alpha2 / (dx * dx);
    const double drift = opt.comoving_drift ? electron.beta / (2.0 * dx) : 0.0;

    TridiagonalHamiltonian h;
    h.time_tau = tau_c;
    h.periodic = opt.boundary == Boundary::Periodic;
    h.diag.resize(n);
    h.upper.resize(n);
    h.lower.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = grid.xi(i);
        const double e0 = field_at(profile, xi, t);
        const double a0 = unit.alpha0 * e0;
        const double a1 = unit.alpha1 * e0;
        const double phi = laser.q * xi + theta_at(profile, xi, t);
        const double c = std::cos(phi), s = std::sin(phi);
        const double d = 2.0 * kin - (a1 / dx) * c - a0 * s;
        const cplx up{-kin + 0.5 * a1 / dx * c, -drift + 0.5 * a1 / dx * s};
        const cplx lo{-kin + 0.5 * a1 / dx * c, drift - 0.5 * a1 / dx * s};
        if (!std::isfinite(d) || !std::isfinite(up.real()) || !std::isfinite(up.imag()))
            throw NumericalError("non-finite Hamiltonian entry at xi = " + std::to_string(xi));
        h.diag[i] = d;
        h.upper[i] = up;
        h.lower[i] = lo;
    }
    if (!h.periodic) {
        h.upper[n - 1] = cplx{};
        h.lower[0] = cplx{};
    }
    if (opt.symmetrize) h.symmetrize();
    return h;
}

/// Reusable Crank-Nicolson step  v <- (1 + i dtau H'/2)^-1 (1 - i dtau H'/2) v
/// with H' = H - energy_reference.  The reference only shifts the global phase.
///
/// With A = 1 + i dtau H'/2 the step is evaluated as v - 2 A^-1 (A - 1) v.
/// (A - 1) v is formed from neighbour differences and an extended-precision
/// row sum, so solver rounding scales with the small per-step change rather
/// than with v; this keeps the norm drift of long runs near 1e-13.
///
/// A Hermitian H is fully described by Im(A_ii) and the super-diagonal of A.
/// That case runs a fused kernel (right-hand side built inside the forward
/// sweep, rank-one periodic correction fused with the update and the norm);
/// anything else goes through the general cyclic solver.
namespace detail {

// Row sum of A - 1 = i dtau/2 (d + up + lo) in extended precision; d is the shifted diagonal.
inline cplx row_sum(double d_tau, cplx d, cplx up, cplx lo) {
    using ld = long double;
    const ld hw = 0.5L * static_cast<ld>(d_tau);
    const ld re = static_cast<ld>(d.real()) + static_cast<ld>(up.real()) + static_cast<ld>(lo.real());
    const ld im = static_cast<ld>(d.imag()) + static_cast<ld>(up.imag()) + static_cast<ld>(lo.imag());
    return {static_cast<double>(-hw * im), static_cast<double>(hw * re)};
}

}  // namespace detail

class CrankNicolsonPropagator {
public:
    CrankNicolsonPropagator(const TridiagonalHamiltonian& h, double d_tau, double energy_reference = 0.0)
        : n_(h.size()), periodic_(h.periodic), hermitian_(h.hermiticity_defect() == 0.0) {
        if (!(d_tau > 0.0)) throw DomainError("time step must be positive");
        if (n_ < 3) throw DomainError("propagator needs at least three sites");
        const cplx half{0.0, 0.5 * d_tau};
        scratch_.resize(n_);
        if (hermitian_) {
            w_.resize(n_);
            s_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                w_[i] = 0.5 * d_tau * (h.diag[i].real() - energy_reference);
                s_[i] = half * h.upper[i];
            }
            if (!periodic_) s_[n_ - 1] = cplx{};
            c_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                const std::size_t im = (i + n_ - 1) % n_;
                const cplx up = periodic_ || i + 1 < n_ ? h.upper[i] : cplx{};
                const cplx lo = periodic_ || i > 0 ? std::conj(h.upper[im]) : cplx{};
                c_[i] = detail::row_sum(d_tau, h.diag[i].real() - energy_reference, up, lo);
            }
            factorize_fast();
            return;
        }
        std::vector<cplx> ls(n_), ld(n_), lu(n_);
        gc_.resize(n_);
        gl_.resize(n_);
        gu_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const cplx d = h.diag[i] - energy_reference;
            ld[i] = 1.0 + half * d;
            ls[i] = half * h.lower[i];
            lu[i] = half * h.upper[i];
            gl_[i] = ls[i];
            gu_[i] = lu[i];
            const cplx up = periodic_ || i + 1 < n_ ? h.upper[i] : cplx{};
            const cplx lo = periodic_ || i > 0 ? h.lower[i] : cplx{};
            gc_[i] = detail::row_sum(d_tau, d, up, lo);
        }
        solver_ = CyclicTridiagonalSolver(ls, ld, lu, periodic_);
    }

    /// Advances v in place by one step and returns sum |v_i|^2.
    double step(std::span<cplx> v) { return hermitian_ ? step_fast(v) : step_general(v); }

private:
    // A_ii = 1 + i w_i, A_i,i+1 = s_i, A_i,i-1 = -conj(s_{i-1}) (cyclic indices).
    cplx a_diag(std::size_t i) const { return {1.0, w_[i]}; }
    cplx a_sub(std::size_t i) const { return -std::conj(s_[(i + n_ - 1) % n_]); }

    void factorize_fast() {
        const std::size_t n = n_;
        std::vector<cplx> b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = a_diag(i);
        if (periodic_) {
            alpha_ = s_[n - 1];   // A[n-1][0]
            beta_ = a_sub(0);     // A[0][n-1]
            gamma_ = -b[0];
            b[0] -= gamma_;
            b[n - 1] -= alpha_ * beta_ / gamma_;
        }
        inv_.resize(n);
        lp_.resize(n);
        cp_.resize(n);
        cplx prev{};
        for (std::size_t i = 0; i < n; ++i) {
            const cplx sub = i > 0 ? a_sub(i) : cplx{};
            const cplx den = b[i] - sub * prev;
            if (std::abs(den) < 1e-300) throw SolverAbort("Crank-Nicolson matrix is singular at row " + std::to_string(i));
            inv_[i] = 1.0 / den;
            lp_[i] = sub * inv_[i];
            prev = cp_[i] = (i + 1 < n ? s_[i] : cplx{}) * inv_[i];
        }
        if (periodic_) {
            z_.assign(n, cplx{});
            z_[0] = gamma_;
            z_[n - 1] = alpha_;
            z_[0] *= inv_[0];
            for (std::size_t i = 1; i < n; ++i) z_[i] = z_[i] * inv_[i] - detail::cmul(lp_[i], z_[i - 1]);
            for (std::size_t i = n - 1; i-- > 0;) z_[i] -= detail::cmul(cp_[i], z_[i + 1]);
            denom_ = 1.0 + z_[0] + beta_ * z_[n - 1] / gamma_;
            if (std::abs(denom_) < 1e-300) throw SolverAbort("cyclic Crank-Nicolson system is singular");
        }
    }

    double step_fast(std::span<cplx> vs) {
        using detail::cmul;
        const std::size_t n = n_;
        cplx* v = vs.data();
        cplx* y = scratch_.data();
        const cplx* s = s_.data();
        const cplx* inv = inv_.data();
        const cplx* lp = lp_.data();
        const cplx* cp = cp_.data();

        // r_i = ((A - 1) x)_i, then forward elimination y_i = r_i / b_i - l'_i y_{i-1}.
        const cplx* c = c_.data();
        auto rhs = [&](std::size_t i, cplx xm, cplx x0, cplx xp, cplx sm) {
            return cmul(c[i], x0) + cmul(s[i], xp - x0) - cmul(std::conj(sm), xm - x0);
        };
        const cplx s_last = periodic_ ? s[n - 1] : cplx{};
        cplx yprev = cmul(rhs(0, periodic_ ? v[n - 1] : cplx{}, v[0], v[1], s_last), inv[0]);
        y[0] = yprev;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            yprev = cmul(rhs(i, v[i - 1], v[i], v[i + 1], s[i - 1]), inv[i]) - cmul(lp[i], yprev);
            y[i] = yprev;
        }
        {
            const std::size_t i = n - 1;
            y[i] = cmul(rhs(i, v[i - 1], v[i], periodic_ ? v[0] : cplx{}, s[i - 1]), inv[i]) - cmul(lp[i], yprev);
        }
        // Back substitution in place.
        cplx next = y[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            next = y[i] - cmul(cp[i], next);
            y[i] = next;
        }
        double norm = 0.0;
        if (periodic_) {
            const cplx f = (y[0] + beta_ * y[n - 1] / gamma_) / denom_;
            const cplx* z = z_.data();
            for (std::size_t i = 0; i < n; ++i) {
                const cplx t = v[i] - 2.0 * (y[i] - cmul(f, z[i]));
                v[i] = t;
                norm += t.real() * t.real() + t.imag() * t.imag();
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const cplx t = v[i] - 2.0 * y[i];
                v[i] = t;
                norm += t.real() * t.real() + t.imag() * t.imag();
            }
        }
        return norm;
    }

    double step_general(std::span<cplx> v) {
        const std::size_t n = n_;
        cplx* r = scratch_.data();
        const cplx* x = v.data();
        using detail::cmul;
        const cplx *gc = gc_.data(), *gl = gl_.data(), *gu = gu_.data();
        for (std::size_t i = 0; i < n; ++i) {
            const cplx xm = i > 0 ? x[i - 1] : (periodic_ ? x[n - 1] : cplx{});
            const cplx xp = i + 1 < n ? x[i + 1] : (periodic_ ? x[0] : cplx{});
            r[i] = cmul(gc[i], x[i]) + cmul(gu[i], xp - x[i]) + cmul(gl[i], xm - x[i]);
        }
        solver_.solve(scratch_);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] -= 2.0 * r[i];
            norm += std::norm(v[i]);
        }
        return norm;
    }

    std::size_t n_;
    bool periodic_;
    bool hermitian_;
    std::vector<cplx> scratch_;
    // fast path
    std::vector<double> w_;
    std::vector<cplx> s_, c_, inv_, lp_, cp_, z_;
    cplx alpha_{}, beta_{}, gamma_{}, denom_{};
    // general path
    std::vector<cplx> gc_, gl_, gu_;
    CyclicTridiagonalSolver solver_;
};

inline Wavepacket cn_step(const Wavepacket& state, const TridiagonalHamiltonian& h, double d_tau) {
    detail::check_representation(state, Representation::Position, "cn_step");
    if (h.size() != state.grid().size()) throw DomainError("Hamiltonian and state sizes differ");
    CrankNicolsonPropagator prop(h, d_tau);
    std::vector<cplx> v(state.data());
    prop.step(v);
    return Wavepacket(state.grid(), std::move(v), Representation::Position, state.k_center());
}

/// Discrete kinetic energy 2 a2 (1 - cos(k dxi)) / dxi^2 (1/m) of a plane wave on the grid.
inline double discrete_kinetic(const Grid& grid, const ElectronParams& electron, double k) {
    const double a2 = constants::hbar / (2.0 * electron.dispersion_mass() * constants::speed_of_light);
    const double dx = grid.d_xi();
    return 2.0 * a2 * (1.0 - std::cos(k * dx)) / (dx * dx);
}

struct EvolutionConfig {
    enum class Reference { Auto, Zero, Fixed };

    double total_time = 25e-12;  // s
    std::size_t n_steps = 0;     // 0 = choose from the populated energy band
    std::size_t snapshot_every = 0;  // 0 = only initial and final
    Boundary boundary = Boundary::Periodic;
    bool symmetrize = true;
    bool comoving_drift = false;
    double norm_tolerance = 1e-6;
    bool store_snapshots = true;
    Reference reference = Reference::Auto;
    double reference_value = 0.0;  // 1/m, used with Reference::Fixed
    double max_phase_per_step = 0.05;
    double band_padding_q = 0.0;  // momentum padding (units of q) around the populated band; 0 = automatic
};

struct SimulationRecord {
    std::vector<double> times;           // s
    std::vector<Wavepacket> snapshots;   // position representation
    std::vector<double> norm_history;    // after every step, index 0 = initial
    EvolutionConfig config;
    std::size_t n_steps = 0;
    std::size_t steps_completed = 0;
    double energy_reference = 0.0;       // 1/m
    double final_norm_drift = 0.0;
    double max_norm_drift = 0.0;
};

/// Thrown when the norm drifts beyond tolerance; carries everything recorded so far.
class EvolutionAborted : public SolverAbort {
public:
    EvolutionAborted(const std::string& what, SimulationRecord partial)
        : SolverAbort(what), partial_(std::move(partial)) {}
    const SimulationRecord& partial() const noexcept { return partial_; }

private:
    SimulationRecord partial_;
};

using SnapshotObserver = std::function<void(double time, const Wavepacket& state)>;

/// Energy scale (1/m) of the populated band after subtracting the reference,
/// padded in momentum (see EvolutionConfig::band_padding_q) and by the strongest coupling.
inline double populated_energy_scale(const Wavepacket& momentum_state, const ElectronParams& electron,
                                     const LaserGratingParams& laser, const FieldProfile& profile,
                                     double reference, double padding_q = 0.0) {
    const Grid& g = momentum_state.grid();
    const auto dens = momentum_state.density();
    const double peak = *std::max_element(dens.begin(), dens.end());
    double kmin = 0.0, kmax = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < dens.size(); ++j) {
        if (dens[j] > 1e-10 * peak) {
            if (!any) kmin = g.k(j);
            kmax = g.k(j);
            any = true;
        }
    }
    double e0max = 0.0;
    for (std::size_t i = 0; i < g.size(); i += std::max<std::size_t>(1, g.size() / 4096))
        e0max = std::max(e0max, field_at(profile, g.xi(i)));
    e0max = std::max({e0max, profile.e0_central, profile.e_lo, profile.e_hi});
    if (!(padding_q > 0.0)) {
        // Two recoils, or the Raman-Nath reach 2|Omega| / E_recoil when the coupling is strong.
        const double omega = rabi_frequency(electron, laser, e0max);
        padding_q = std::max(2.0, 2.0 * omega / recoil_energy(laser));
    }
    kmin -= padding_q * laser.q;
    kmax += padding_q * laser.q;
    double emax = 0.0;
    const std::size_t samples = 257;
    for (std::size_t s = 0; s < samples; ++s) {
        const double k = kmin + (kmax - kmin) * static_cast<double>(s) / (samples - 1);
        emax = std::max(emax, std::abs(discrete_kinetic(g, electron, k) - reference));
    }
    const DerivedCouplings unit = tdse_coefficients(electron, laser, 1.0);
    return emax + 2.0 * unit.alpha0 * e0max;
}

inline double kinetic_expectation(const Wavepacket& momentum_state, const ElectronParams& electron) {
    const Grid& g = momentum_state.grid();
    double s = 0.0, w = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double p = std::norm(momentum_state.data()[j]);
        s += p * discrete_kinetic(g, electron, g.k(j));
        w += p;
    }
    return w > 0.0 ? s / w : 0.0;
}

inline std::size_t suggest_time_steps(const Wavepacket& initial, const ElectronParams& electron,
                                      const LaserGratingParams& laser, const FieldProfile& profile,
                                      const EvolutionConfig& cfg) {
    const Wavepacket mom =
        initial.representation() == Representation::Momentum ? initial : to_momentum(initial);
    const double ref = cfg.reference == EvolutionConfig::Reference::Zero    ? 0.0
                       : cfg.reference == EvolutionConfig::Reference::Fixed ? cfg.reference_value
                                                                            : kinetic_expectation(mom, electron);
    const double scale = populated_energy_scale(mom, electron, laser, profile, ref, cfg.band_padding_q);
    const double tau = constants::speed_of_light * cfg.total_time;
    return static_cast<std::size_t>(std::ceil(tau * scale / cfg.max_phase_per_step));
}

inline SimulationRecord evolve(const Wavepacket& initial, const ElectronParams& electron,
                               const LaserGratingParams& laser, const FieldProfile& profile,
                               const EvolutionConfig& config, const SnapshotObserver& observer = {}) {
    profile.validate();
    if (!(config.total_time > 0.0)) throw DomainError("evolution time must be positive");
    FlushDenormalsGuard ftz;
    const Wavepacket start = initial.representation() == Representation::Position ? initial : to_position(initial);
    const Wavepacket mom = initial.representation() == Representation::Momentum ? initial : to_momentum(initial);
    const Grid& grid = start.grid();

    SimulationRecord rec;
    rec.config = config;
    rec.n_steps = config.n_steps > 0 ? config.n_steps : suggest_time_steps(mom, electron, laser, profile, config);
    switch (config.reference) {
        case EvolutionConfig::Reference::Auto: rec.energy_reference = kinetic_expectation(mom, electron); break;
        case EvolutionConfig::Reference::Zero: rec.energy_reference = 0.0; break;
        case EvolutionConfig::Reference::Fixed: rec.energy_reference = config.reference_value; break;
    }

    const double dt = config.total_time / static_cast<double>(rec.n_steps);
    const double d_tau = constants::speed_of_light * dt;
    const AssemblyOptions aopt{config.boundary, config.symmetrize, config.comoving_drift};

    std::vector<cplx> v(start.data());
    auto norm_of = [&] {
        double s = 0.0;
        for (const auto& a : v) s += std::norm(a);
        return s * grid.d_xi();
    };
    auto record = [&](double t) {
        Wavepacket wp(grid, v, Representation::Position, start.k_center());
        if (observer) observer(t, wp);
        rec.times.push_back(t);
        if (config.store_snapshots) rec.snapshots.push_back(std::move(wp));
    };

    rec.norm_history.reserve(rec.n_steps + 1);
    rec.norm_history.push_back(norm_of());
    record(0.0);

    std::optional<CrankNicolsonPropagator> prop;
    if (!profile.time_dependent())
        prop.emplace(assemble_hamiltonian(grid, electron, laser, profile, 0.0, aopt), d_tau, rec.energy_reference);

    for (std::size_t s = 1; s <= rec.n_steps; ++s) {
        if (profile.time_dependent()) {
            const double tau_mid = (static_cast<double>(s) - 0.5) * d_tau;
            prop.emplace(assemble_hamiltonian(grid, electron, laser, profile, tau_mid, aopt), d_tau,
                         rec.energy_reference);
        }
        const double nrm = prop->step(v) * grid.d_xi();
        rec.norm_history.push_back(nrm);
        rec.steps_completed = s;
        const double drift = std::abs(nrm - 1.0);
        rec.max_norm_drift = std::max(rec.max_norm_drift, drift);
        if (!(drift <= config.norm_tolerance)) {
            rec.final_norm_drift = drift;
            record(static_cast<double>(s) * dt);
            throw EvolutionAborted("norm drift " + std::to_string(drift) + " exceeds tolerance " +
                                       std::to_string(config.norm_tolerance) + " at step " + std::to_string(s),
                                   std::move(rec));
        }
        const bool snap = config.snapshot_every > 0 && s % config.snapshot_every == 0;
        if (snap || s == rec.n_steps) record(static_cast<double>(s) * dt);
    }
    rec.final_norm_drift = std::abs(rec.norm_history.back() - 1.0);
    return rec;
}

}  // namespace feqo
