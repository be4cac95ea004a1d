#pragma once

// Experiment description, its flat "section.key = value" text form, and the
// resolution of a description into solver inputs.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "feqo/constants.hpp"
#include "feqo/errors.hpp"
#include "feqo/field_profile.hpp"
#include "feqo/physics.hpp"
#include "feqo/regime.hpp"
#include "feqo/tdse.hpp"
#include "feqo/wavepacket.hpp"

namespace feqo {

struct GradientSpec {
    bool enabled = false;
    double xi_lo_nm = -100.0;
    double xi_hi_nm = 100.0;
    double e_lo_v_per_m = 0.0;
    double e_hi_v_per_m = 2e8;
    bool extend = false;  // continue the ramp outside the window instead of holding its end values

    bool operator==(const GradientSpec&) const = default;
};

struct ExperimentParams {
    // electron
    double kinetic_energy_ev = 100.0;
    // laser
    double photon_energy_ev = 6.2;
    double e0_v_per_m = 1e8;
    double theta_rad = constants::pi / 2.0;
    GradientSpec gradient;
    // grating; empty = phase matched
    std::optional<double> period_nm = 4.0;
    // wavepacket
    double delta_k_over_q = 0.02;
    double dk_offset_over_q = 0.5;
    std::optional<double> superposition_dk_offset_over_q;
    double superposition_weight_re = 1.0;
    double superposition_weight_im = 0.0;
    double chirp_ld_cm = 0.0;
    // grid; empty domain = automatic
    std::optional<double> domain_nm;
    long long n_points = 65536;
    // evolution; zero = automatic
    double t_total_ps = 25.0;
    long long n_steps = 0;
    long long snapshot_every = 0;
    Boundary boundary = Boundary::Periodic;
    bool symmetrize = true;
    bool comoving_drift = false;
    double norm_tolerance = 1e-6;
    double max_phase_per_step = 0.05;
    // outputs
    std::vector<std::string> outputs{"spectrum", "populations", "record", "wigner", "heatmaps"};
    // analysis
    double window_half_width_over_q = 0.25;
    long long spectrogram_rows = 1024;
    double spectrogram_range_over_q = 3.0;
    // classifier
    RegimeThresholds classifier;

    bool operator==(const ExperimentParams& o) const {
        auto th = [](const RegimeThresholds& t) {
            return std::tuple(t.beta_fast, t.plane_wave_factor, t.point_particle_factor, t.klein_cook_min,
                              t.anomalous_dk_over_q);
        };
        return kinetic_energy_ev == o.kinetic_energy_ev && photon_energy_ev == o.photon_energy_ev &&
               e0_v_per_m == o.e0_v_per_m && theta_rad == o.theta_rad && gradient == o.gradient &&
               period_nm == o.period_nm && delta_k_over_q == o.delta_k_over_q &&
               dk_offset_over_q == o.dk_offset_over_q &&
               superposition_dk_offset_over_q == o.superposition_dk_offset_over_q &&
               superposition_weight_re == o.superposition_weight_re &&
               superposition_weight_im == o.superposition_weight_im && chirp_ld_cm == o.chirp_ld_cm &&
               domain_nm == o.domain_nm && n_points == o.n_points && t_total_ps == o.t_total_ps &&
               n_steps == o.n_steps && snapshot_every == o.snapshot_every && boundary == o.boundary &&
               symmetrize == o.symmetrize && comoving_drift == o.comoving_drift &&
               norm_tolerance == o.norm_tolerance && max_phase_per_step == o.max_phase_per_step &&
               outputs == o.outputs && window_half_width_over_q == o.window_half_width_over_q &&
               spectrogram_rows == o.spectrogram_rows && spectrogram_range_over_q == o.spectrogram_range_over_q &&
               th(classifier) == th(o.classifier);
    }

    bool wants(const std::string& output) const {
        return std::find(outputs.begin(), outputs.end(), output) != outputs.end();
    }
};

inline const std::vector<std::string>& known_outputs() {
    static const std::vector<std::string> k{"spectrum", "populations", "record", "wigner", "heatmaps"};
    return k;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    long long v = 0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) return std::nullopt;
    return v;
}

/// Accepts plain numbers and multiples of pi: "pi", "-pi/2", "0.25*pi", "3pi/4".
inline std::optional<double> parse_angle(const std::string& raw) {
    const std::string s = lower(trim(raw));
    if (auto v = parse_double(s)) return v;
    const auto at = s.find("pi");
    if (at == std::string::npos) return std::nullopt;
    std::string pre = trim(s.substr(0, at));
    std::string post = trim(s.substr(at + 2));
    double coef = 1.0;
    if (!pre.empty() && pre.back() == '*') pre = trim(pre.substr(0, pre.size() - 1));
    if (pre == "-") coef = -1.0;
    else if (pre == "+" || pre.empty()) coef = 1.0;
    else if (auto c = parse_double(pre)) coef = *c;
    else return std::nullopt;
    double den = 1.0;
    if (!post.empty()) {
        if (post.front() != '/') return std::nullopt;
        auto d = parse_double(trim(post.substr(1)));
        if (!d || *d == 0.0) return std::nullopt;
        den = *d;
    }
    return coef * constants::pi / den;
}

inline std::optional<bool> parse_bool(const std::string& s) {
    const std::string l = lower(s);
    if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
    if (l == "false" || l == "no" || l == "off" || l == "0") return false;
    return std::nullopt;
}

inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest form that round-trips
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses configuration text.  Malformed lines raise SyntaxError; unknown
/// keys and unparsable values are collected into one ValidationError.
/// Range checks live in validate().
inline ExperimentParams parse_config_text(const std::string& text) {
    ExperimentParams p;
    std::vector<std::string> problems;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw SyntaxError(ln, "expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw SyntaxError(ln, "missing key before '='");
        if (key.find_first_of(" \t") != std::string::npos) throw SyntaxError(ln, "key contains whitespace: '" + key + "'");
        const std::string where = "line " + std::to_string(ln) + ": " + key;
        if (auto it = seen.find(key); it != seen.end()) {
            problems.push_back(where + ": duplicate key (first set on line " + std::to_string(it->second) + ")");
            continue;
        }
        seen[key] = ln;

        auto num = [&](double& dst) {
            if (auto v = detail::parse_double(val)) dst = *v;
            else problems.push_back(where + ": expected a number, got '" + val + "'");
        };
        auto integer = [&](long long& dst, bool allow_auto) {
            if (allow_auto && detail::lower(val) == "auto") dst = 0;
            else if (auto v = detail::parse_int(val)) dst = *v;
            else problems.push_back(where + ": expected an integer" + (allow_auto ? " or 'auto'" : "") + ", got '" + val + "'");
        };
        auto boolean = [&](bool& dst) {
            if (auto v = detail::parse_bool(val)) dst = *v;
            else problems.push_back(where + ": expected true or false, got '" + val + "'");
        };
        auto auto_num = [&](std::optional<double>& dst) {
            if (detail::lower(val) == "auto") dst.reset();
            else if (auto v = detail::parse_double(val)) dst = *v;
            else problems.push_back(where + ": expected a number or 'auto', got '" + val + "'");
        };

        if (key == "electron.kinetic_energy_ev") num(p.kinetic_energy_ev);
        else if (key == "electron.beta") {
            double b = 0.0;
            if (auto v = detail::parse_double(val)) {
                b = *v;
                if (b > 0.0 && b < 1.0) p.kinetic_energy_ev = kinetic_energy_from_beta(b);
                else problems.push_back(where + ": beta must lie in (0, 1), got " + val);
            } else {
                problems.push_back(where + ": expected a number, got '" + val + "'");
            }
        }
        else if (key == "laser.photon_energy_ev") num(p.photon_energy_ev);
        else if (key == "laser.e0_v_per_m") num(p.e0_v_per_m);
        else if (key == "laser.theta_rad") {
            if (auto v = detail::parse_angle(val)) p.theta_rad = *v;
            else problems.push_back(where + ": expected an angle (number or multiple of pi), got '" + val + "'");
        }
        else if (key == "laser.gradient.kind") {
            const std::string k = detail::lower(val);
            if (k == "none" || k == "uniform") p.gradient.enabled = false;
            else if (k == "linear") p.gradient.enabled = true;
            else problems.push_back(where + ": expected 'none' or 'linear', got '" + val + "'");
        }
        else if (key == "laser.gradient.xi_lo_nm") num(p.gradient.xi_lo_nm);
        else if (key == "laser.gradient.xi_hi_nm") num(p.gradient.xi_hi_nm);
        else if (key == "laser.gradient.e_lo_v_per_m") num(p.gradient.e_lo_v_per_m);
        else if (key == "laser.gradient.e_hi_v_per_m") num(p.gradient.e_hi_v_per_m);
        else if (key == "laser.gradient.clamp") {
            const std::string k = detail::lower(val);
            if (k == "hold") p.gradient.extend = false;
            else if (k == "extend") p.gradient.extend = true;
            else problems.push_back(where + ": expected 'hold' or 'extend', got '" + val + "'");
        }
        else if (key == "grating.period_nm") auto_num(p.period_nm);
        else if (key == "wavepacket.delta_k_over_q") num(p.delta_k_over_q);
        else if (key == "wavepacket.dk_offset_over_q") num(p.dk_offset_over_q);
        else if (key == "wavepacket.superposition.dk_offset_over_q") {
            if (detail::lower(val) == "none") p.superposition_dk_offset_over_q.reset();
            else if (auto v = detail::parse_double(val)) p.superposition_dk_offset_over_q = *v;
            else problems.push_back(where + ": expected a number or 'none', got '" + val + "'");
        }
        else if (key == "wavepacket.superposition.weight_re") num(p.superposition_weight_re);
        else if (key == "wavepacket.superposition.weight_im") num(p.superposition_weight_im);
        else if (key == "wavepacket.chirp_ld_cm") num(p.chirp_ld_cm);
        else if (key == "grid.domain_nm") auto_num(p.domain_nm);
        else if (key == "grid.n_points") integer(p.n_points, false);
        else if (key == "evolution.t_total_ps") num(p.t_total_ps);
        else if (key == "evolution.n_steps") integer(p.n_steps, true);
        else if (key == "evolution.snapshot_every") integer(p.snapshot_every, true);
        else if (key == "evolution.boundary") {
            const std::string k = detail::lower(val);
            if (k == "periodic") p.boundary = Boundary::Periodic;
            else if (k == "dirichlet") p.boundary = Boundary::Dirichlet;
            else problems.push_back(where + ": expected 'periodic' or 'dirichlet', got '" + val + "'");
        }
        else if (key == "evolution.symmetrize") boolean(p.symmetrize);
        else if (key == "evolution.comoving_drift") boolean(p.comoving_drift);
        else if (key == "evolution.norm_tolerance") num(p.norm_tolerance);
        else if (key == "evolution.max_phase_per_step") num(p.max_phase_per_step);
        else if (key == "outputs") {
            p.outputs.clear();
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = detail::lower(detail::trim(item));
                if (item.empty() || item == "none") continue;
                const auto& k = known_outputs();
                if (std::find(k.begin(), k.end(), item) == k.end())
                    problems.push_back(where + ": unknown output '" + item + "'");
                else if (!p.wants(item))
                    p.outputs.push_back(item);
            }
        }
        else if (key == "analysis.window_half_width_over_q") num(p.window_half_width_over_q);
        else if (key == "analysis.spectrogram_rows") integer(p.spectrogram_rows, false);
        else if (key == "analysis.spectrogram_range_over_q") num(p.spectrogram_range_over_q);
        else if (key == "classifier.beta_fast") num(p.classifier.beta_fast);
        else if (key == "classifier.plane_wave_factor") num(p.classifier.plane_wave_factor);
        else if (key == "classifier.point_particle_factor") num(p.classifier.point_particle_factor);
        else if (key == "classifier.klein_cook_min") num(p.classifier.klein_cook_min);
        else if (key == "classifier.anomalous_dk_over_q") num(p.classifier.anomalous_dk_over_q);
        else problems.push_back(where + ": unknown key");
    }
    if (!problems.empty()) throw ValidationError(problems);
    return p;
}

/// Range checks; returns every violated constraint.
inline std::vector<std::string> validation_problems(const ExperimentParams& p) {
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    need(finite(p.kinetic_energy_ev) && p.kinetic_energy_ev > 0.0, "electron.kinetic_energy_ev: must be positive");
    need(finite(p.photon_energy_ev) && p.photon_energy_ev > 0.0, "laser.photon_energy_ev: must be positive");
    need(finite(p.e0_v_per_m) && p.e0_v_per_m >= 0.0, "laser.e0_v_per_m: must be non-negative");
    need(finite(p.theta_rad), "laser.theta_rad: must be finite");
    if (p.gradient.enabled) {
        need(finite(p.gradient.xi_lo_nm) && finite(p.gradient.xi_hi_nm) && p.gradient.xi_hi_nm > p.gradient.xi_lo_nm,
             "laser.gradient.xi_hi_nm: must exceed laser.gradient.xi_lo_nm");
        need(finite(p.gradient.e_lo_v_per_m) && p.gradient.e_lo_v_per_m >= 0.0,
             "laser.gradient.e_lo_v_per_m: must be non-negative");
        need(finite(p.gradient.e_hi_v_per_m) && p.gradient.e_hi_v_per_m >= 0.0,
             "laser.gradient.e_hi_v_per_m: must be non-negative");
    }
    if (p.period_nm) need(finite(*p.period_nm) && *p.period_nm > 0.0, "grating.period_nm: must be positive or 'auto'");
    need(finite(p.delta_k_over_q) && p.delta_k_over_q > 0.0, "wavepacket.delta_k_over_q: must be positive");
    need(finite(p.dk_offset_over_q), "wavepacket.dk_offset_over_q: must be finite");
    if (p.superposition_dk_offset_over_q)
        need(finite(*p.superposition_dk_offset_over_q), "wavepacket.superposition.dk_offset_over_q: must be finite");
    need(finite(p.superposition_weight_re) && finite(p.superposition_weight_im),
         "wavepacket.superposition.weight: must be finite");
    need(finite(p.chirp_ld_cm) && p.chirp_ld_cm >= 0.0, "wavepacket.chirp_ld_cm: must be non-negative");
    if (p.domain_nm) need(finite(*p.domain_nm) && *p.domain_nm > 0.0, "grid.domain_nm: must be positive or 'auto'");
    need(p.n_points >= 4 && (p.n_points & (p.n_points - 1)) == 0,
         "grid.n_points: must be a power of two >= 4, got " + std::to_string(p.n_points));
    need(finite(p.t_total_ps) && p.t_total_ps > 0.0, "evolution.t_total_ps: must be positive");
    need(p.n_steps >= 0, "evolution.n_steps: must be positive or 'auto'");
    need(p.snapshot_every >= 0, "evolution.snapshot_every: must be positive or 'auto'");
    need(finite(p.norm_tolerance) && p.norm_tolerance > 0.0, "evolution.norm_tolerance: must be positive");
    need(finite(p.max_phase_per_step) && p.max_phase_per_step > 0.0, "evolution.max_phase_per_step: must be positive");
    need(finite(p.window_half_width_over_q) && p.window_half_width_over_q > 0.0 && p.window_half_width_over_q <= 0.25,
         "analysis.window_half_width_over_q: must lie in (0, 0.25]");
    need(p.spectrogram_rows >= 1, "analysis.spectrogram_rows: must be at least 1");
    need(finite(p.spectrogram_range_over_q) && p.spectrogram_range_over_q > 0.0,
         "analysis.spectrogram_range_over_q: must be positive");
    const auto& c = p.classifier;
    need(c.beta_fast > 0.0 && c.beta_fast < 1.0, "classifier.beta_fast: must lie in (0, 1)");
    need(c.point_particle_factor > 0.0 && c.plane_wave_factor > c.point_particle_factor,
         "classifier.plane_wave_factor: must exceed classifier.point_particle_factor > 0");
    need(c.klein_cook_min > 0.0, "classifier.klein_cook_min: must be positive");
    need(c.anomalous_dk_over_q > 0.0, "classifier.anomalous_dk_over_q: must be positive");
    return out;
}

inline void validate(const ExperimentParams& p) {
    auto problems = validation_problems(p);
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

inline ExperimentParams parse_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("failed reading config file '" + path + "'");
    ExperimentParams p = parse_config_text(ss.str());
    validate(p);
    return p;
}

inline std::string serialize(const ExperimentParams& p) {
    using detail::fmt;
    std::ostringstream o;
    auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
    kv("electron.kinetic_energy_ev", fmt(p.kinetic_energy_ev));
    kv("laser.photon_energy_ev", fmt(p.photon_energy_ev));
    kv("laser.e0_v_per_m", fmt(p.e0_v_per_m));
    kv("laser.theta_rad", fmt(p.theta_rad));
    kv("laser.gradient.kind", p.gradient.enabled ? "linear" : "none");
    kv("laser.gradient.xi_lo_nm", fmt(p.gradient.xi_lo_nm));
    kv("laser.gradient.xi_hi_nm", fmt(p.gradient.xi_hi_nm));
    kv("laser.gradient.e_lo_v_per_m", fmt(p.gradient.e_lo_v_per_m));
    kv("laser.gradient.e_hi_v_per_m", fmt(p.gradient.e_hi_v_per_m));
    kv("laser.gradient.clamp", p.gradient.extend ? "extend" : "hold");
    kv("grating.period_nm", p.period_nm ? fmt(*p.period_nm) : "auto");
    kv("wavepacket.delta_k_over_q", fmt(p.delta_k_over_q));
    kv("wavepacket.dk_offset_over_q", fmt(p.dk_offset_over_q));
    kv("wavepacket.superposition.dk_offset_over_q",
       p.superposition_dk_offset_over_q ? fmt(*p.superposition_dk_offset_over_q) : "none");
    kv("wavepacket.superposition.weight_re", fmt(p.superposition_weight_re));
    kv("wavepacket.superposition.weight_im", fmt(p.superposition_weight_im));
    kv("wavepacket.chirp_ld_cm", fmt(p.chirp_ld_cm));
    kv("grid.domain_nm", p.domain_nm ? fmt(*p.domain_nm) : "auto");
    kv("grid.n_points", std::to_string(p.n_points));
    kv("evolution.t_total_ps", fmt(p.t_total_ps));
    kv("evolution.n_steps", p.n_steps ? std::to_string(p.n_steps) : "auto");
    kv("evolution.snapshot_every", p.snapshot_every ? std::to_string(p.snapshot_every) : "auto");
    kv("evolution.boundary", p.boundary == Boundary::Periodic ? "periodic" : "dirichlet");
    kv("evolution.symmetrize", p.symmetrize ? "true" : "false");
    kv("evolution.comoving_drift", p.comoving_drift ? "true" : "false");
    kv("evolution.norm_tolerance", fmt(p.norm_tolerance));
    kv("evolution.max_phase_per_step", fmt(p.max_phase_per_step));
    std::string outs;
    for (const auto& s : p.outputs) outs += (outs.empty() ? "" : ", ") + s;
    kv("outputs", outs.empty() ? "none" : outs);
    kv("analysis.window_half_width_over_q", fmt(p.window_half_width_over_q));
    kv("analysis.spectrogram_rows", std::to_string(p.spectrogram_rows));
    kv("analysis.spectrogram_range_over_q", fmt(p.spectrogram_range_over_q));
    kv("classifier.beta_fast", fmt(p.classifier.beta_fast));
    kv("classifier.plane_wave_factor", fmt(p.classifier.plane_wave_factor));
    kv("classifier.point_particle_factor", fmt(p.classifier.point_particle_factor));
    kv("classifier.klein_cook_min", fmt(p.classifier.klein_cook_min));
    kv("classifier.anomalous_dk_over_q", fmt(p.classifier.anomalous_dk_over_q));
    return o.str();
}

/// Sets one dotted key from text, as a config line would.
inline void set_field(ExperimentParams& p, const std::string& key, const std::string& value) {
    std::string text = serialize(p);
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    bool replaced = false;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos && detail::trim(line.substr(0, eq)) == key) {
            out << key << " = " << value << '\n';
            replaced = true;
        } else {
            out << line << '\n';
        }
    }
    if (!replaced) {
        if (key == "electron.beta") out << key << " = " << value << '\n';
        else throw ValidationError({key + ": unknown key"});
    }
    std::string merged = out.str();
    if (key == "electron.beta") {
        // beta overrides the serialized kinetic energy line
        std::istringstream m(merged);
        std::ostringstream f;
        while (std::getline(m, line))
            if (line.rfind("electron.kinetic_energy_ev", 0) != 0) f << line << '\n';
        merged = f.str();
    }
    p = parse_config_text(merged);
}

/// Everything the solver and analysis need, derived from the parameters.
struct Setup {
    ElectronParams electron;
    LaserGratingParams laser;
    FieldProfile profile;
    Grid grid;
    WavepacketSpec wavepacket;
    EvolutionConfig evolution;
    DerivedCouplings couplings;  // at the central amplitude
    ValidityMargin validity;
    double phase_mismatch = 0.0;
    double wavelength = 0.0;
};

/// Domain of a power-of-two number of periods covering 16 FWHM of the
/// transform-limited packet and at least 64 periods.
inline double default_domain(double period, double delta_k) {
    const double sigma_z = 1.0 / (2.0 * delta_k);
    const double fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma_z;
    const double periods = std::max(64.0, 16.0 * fwhm / period);
    return period * std::exp2(std::ceil(std::log2(periods)));
}

inline Setup resolve(const ExperimentParams& p) {
    validate(p);
    Setup s;
    s.electron = electron_from_energy(p.kinetic_energy_ev);
    const double period = p.period_nm ? *p.period_nm * 1e-9 : phase_matched_period(s.electron, p.photon_energy_ev);
    s.laser = make_laser(p.photon_energy_ev, period, p.e0_v_per_m, p.theta_rad);
    s.wavelength = s.laser.wavelength();
    s.phase_mismatch = phase_velocity_mismatch(s.electron, s.laser);

    if (p.gradient.enabled) {
        s.profile = FieldProfile::linear_gradient(p.gradient.xi_lo_nm * 1e-9, p.gradient.e_lo_v_per_m,
                                                  p.gradient.xi_hi_nm * 1e-9, p.gradient.e_hi_v_per_m, p.theta_rad);
        s.profile.clamp = p.gradient.extend ? FieldProfile::Clamp::Extend : FieldProfile::Clamp::Hold;
        s.profile.e0_central = field_at(s.profile, 0.0);
    } else {
        s.profile = FieldProfile::uniform(p.e0_v_per_m, p.theta_rad);
    }
    s.couplings = tdse_coefficients(s.electron, s.laser, s.profile.e0_central);
    s.validity = two_level_validity(s.couplings);

    const double dk = p.delta_k_over_q * s.laser.q;
    const double domain = p.domain_nm ? *p.domain_nm * 1e-9 : default_domain(period, dk);
    s.grid = Grid(-0.5 * domain, 0.5 * domain, static_cast<std::size_t>(p.n_points));

    s.wavepacket.delta_k = p.delta_k_over_q;
    s.wavepacket.dk_offset = p.dk_offset_over_q;
    s.wavepacket.chirp_drift = p.chirp_ld_cm * 1e-2;
    if (p.superposition_dk_offset_over_q)
        s.wavepacket.superposition =
            Superposition{*p.superposition_dk_offset_over_q, {p.superposition_weight_re, p.superposition_weight_im}};

    EvolutionConfig& e = s.evolution;
    e.total_time = p.t_total_ps * 1e-12;
    e.n_steps = static_cast<std::size_t>(p.n_steps);
    e.snapshot_every = static_cast<std::size_t>(p.snapshot_every);
    e.boundary = p.boundary;
    e.symmetrize = p.symmetrize;
    e.comoving_drift = p.comoving_drift;
    e.norm_tolerance = p.norm_tolerance;
    e.max_phase_per_step = p.max_phase_per_step;
    return s;
}

inline RegimeLabel classify_regime(const ExperimentParams& p, const Setup& s) {
    RegimeInputs in;
    in.beta = s.electron.beta;
    in.wavelength = s.wavelength;
    in.q = s.laser.q;
    in.delta_k = p.delta_k_over_q * s.laser.q;
    in.chirp_drift = p.chirp_ld_cm * 1e-2;
    in.dispersion_mass = s.electron.dispersion_mass();
    in.has_gradient = s.profile.has_gradient();
    in.klein_cook_q = s.couplings.klein_cook_q;
    in.validity_ratio = s.validity.ratio;
    return classify_regime(in, p.classifier);
}

inline RegimeLabel classify_regime(const ExperimentParams& p) { return classify_regime(p, resolve(p)); }

}  // namespace feqo
