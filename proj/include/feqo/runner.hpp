#pragma once

// Orchestration: run one experiment, write its outputs and manifest, and run
// parameter sweeps on a worker pool.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "feqo/analysis.hpp"
#include "feqo/checksum.hpp"
#include "feqo/experiment.hpp"
#include "feqo/grid_io.hpp"
#include "feqo/heatmap.hpp"
#include "feqo/tdse.hpp"
#include "feqo/wavepacket.hpp"
#include "feqo/wigner.hpp"

namespace feqo {

struct SeriesPoint {
    double t = 0.0;           // s
    double p_plus = 0.0;      // window at +q/2
    double p_minus = 0.0;     // window at -q/2
    double leakage = 0.0;
    double mean_plus = 0.0;   // rad/m
    double mean_minus = 0.0;  // rad/m
    double split = 0.0;       // rad/m, +q/2 window; 0 when single-lobe or empty
    bool single_lobe = true;
};

struct RunOptions {
    std::size_t keep_states = 0;  // evenly spaced snapshots retained in memory (first and last included)
    std::function<void(std::size_t step, std::size_t total)> progress;
};

struct RunResult {
    ExperimentParams params;
    Setup setup;
    RegimeLabel label;
    UsgPrediction usg;
    std::size_t n_steps = 0;
    std::size_t snapshot_every = 0;
    std::size_t steps_completed = 0;
    double energy_reference = 0.0;
    double max_norm_drift = 0.0;
    double final_norm_drift = 0.0;
    bool aborted = false;
    std::string abort_message;
    double wall_seconds = 0.0;

    std::vector<SeriesPoint> series;
    DataGrid spectrogram;  // rows t (ps), columns dk / q, density per unit q
    Wavepacket initial;    // momentum representation
    Wavepacket final_state;  // position representation
    std::vector<std::pair<double, Wavepacket>> kept;

    const SeriesPoint& final_point() const { return series.back(); }
};

/// Snapshot cadence: 200 records over the run, or 32 per Rabi period when that is finer.
inline std::size_t auto_snapshot_every(std::size_t n_steps, double total_time, double rabi_omega) {
    std::size_t every = n_steps / 200;
    if (rabi_omega > 0.0) {
        const double period = constants::pi * constants::hbar / rabi_omega;
        const double period_steps = period / total_time * static_cast<double>(n_steps);
        every = std::min(every, static_cast<std::size_t>(period_steps / 32.0));
    }
    return std::max<std::size_t>(1, every);
}

inline SeriesPoint measure_point(double t, const Spectrum& s, double q, const SidebandOptions& opt) {
    const SidebandReport r = sideband_populations(s, q, opt);
    SeriesPoint p;
    p.t = t;
    p.p_plus = r.population(1);
    p.p_minus = r.population(-1);
    p.leakage = r.leakage;
    p.mean_plus = r.window(1).mean_dk;
    p.mean_minus = r.window(-1).mean_dk;
    if (!r.window(1).peaks.empty()) {
        const SplitMeasurement m = measure_split(r, 1);
        p.split = m.split;
        p.single_lobe = m.single_lobe;
    }
    return p;
}

inline RunResult simulate(const ExperimentParams& params, const RunOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    res.params = params;
    res.setup = resolve(params);
    const Setup& s = res.setup;
    res.label = classify_regime(params, s);
    res.usg = usg_prediction(s.profile, s.electron, s.laser, s.evolution.total_time);

    res.initial = make_gaussian(s.grid, s.electron, s.laser, s.wavepacket);
    EvolutionConfig cfg = s.evolution;
    if (cfg.n_steps == 0) cfg.n_steps = suggest_time_steps(res.initial, s.electron, s.laser, s.profile, cfg);
    if (cfg.snapshot_every == 0)
        cfg.snapshot_every = auto_snapshot_every(cfg.n_steps, cfg.total_time, s.couplings.rabi_omega);
    cfg.store_snapshots = false;
    res.n_steps = cfg.n_steps;
    res.snapshot_every = cfg.snapshot_every;

    const std::size_t n_snap = cfg.n_steps / cfg.snapshot_every + 1 + (cfg.n_steps % cfg.snapshot_every ? 1 : 0);
    const std::size_t rows = static_cast<std::size_t>(params.spectrogram_rows);
    // rows - 1 evenly strided snapshots plus the final one
    const std::size_t stride = rows > 1 ? std::max<std::size_t>(1, (n_snap - 1 + rows - 2) / (rows - 1)) : n_snap;
    const double q = s.laser.q;
    const std::size_t c_lo = s.grid.k_index(-params.spectrogram_range_over_q * q);
    const std::size_t c_hi = s.grid.k_index(params.spectrogram_range_over_q * q);
    res.spectrogram.cols = c_hi - c_lo + 1;
    res.spectrogram.bounds[2] = s.grid.k(c_lo) / q;
    res.spectrogram.bounds[3] = s.grid.k(c_hi) / q;

    std::vector<std::size_t> keep_idx;
    if (opt.keep_states == 1) keep_idx.push_back(n_snap - 1);
    for (std::size_t i = 0; opt.keep_states > 1 && i < opt.keep_states; ++i)
        keep_idx.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(n_snap - 1) / (opt.keep_states - 1.0))));

    SidebandOptions sopt;
    sopt.half_width_over_q = params.window_half_width_over_q;
    std::size_t index = 0;
    std::vector<double> row_times;
    auto observer = [&](double t, const Wavepacket& wp) {
        const Spectrum sp = spectrum(wp);
        res.series.push_back(measure_point(t, sp, q, sopt));
        if (index % stride == 0 || index + 1 == n_snap) {
            row_times.push_back(t);
            for (std::size_t c = c_lo; c <= c_hi; ++c) res.spectrogram.values.push_back(sp.density[c] * q);
        }
        if (std::find(keep_idx.begin(), keep_idx.end(), index) != keep_idx.end()) res.kept.emplace_back(t, wp);
        res.final_state = wp;
        if (opt.progress) opt.progress(static_cast<std::size_t>(std::llround(t / cfg.total_time * cfg.n_steps)), cfg.n_steps);
        ++index;
    };

    SimulationRecord rec;
    try {
        rec = evolve(res.initial, s.electron, s.laser, s.profile, cfg, observer);
    } catch (const EvolutionAborted& e) {
        rec = e.partial();
        res.aborted = true;
        res.abort_message = e.what();
    }
    res.steps_completed = rec.steps_completed;
    res.energy_reference = rec.energy_reference;
    res.max_norm_drift = rec.max_norm_drift;
    res.final_norm_drift = rec.final_norm_drift;
    res.spectrogram.rows = row_times.size();
    res.spectrogram.bounds[0] = row_times.front() * 1e12;
    res.spectrogram.bounds[1] = row_times.back() * 1e12;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string spectrum_csv(const Wavepacket& wp, double q) {
    const Spectrum s = spectrum(wp);
    std::string out = "dk_over_q,probability_density\n";
    for (std::size_t j = 0; j < s.dk.size(); ++j)
        out += detail::csv_num(s.dk[j] / q) + "," + detail::csv_num(s.density[j] * q) + "\n";
    return out;
}

inline std::string populations_csv(const std::vector<SeriesPoint>& series) {
    std::string out = "t_ps,p_plus_half,p_minus_half,leakage,mean_dk_plus,mean_dk_minus,split_rad_per_m\n";
    for (const auto& p : series) {
        out += detail::csv_num(p.t * 1e12) + "," + detail::csv_num(p.p_plus) + "," + detail::csv_num(p.p_minus) + "," +
               detail::csv_num(p.leakage) + "," + detail::csv_num(p.mean_plus) + "," + detail::csv_num(p.mean_minus) +
               "," + detail::csv_num(p.split) + "\n";
    }
    return out;
}

/// Wigner grid of a state, reduced to at most max_side cells per axis; rows z (nm), columns dk / q.
inline DataGrid wigner_data(const Wavepacket& wp, double q, std::size_t max_side) {
    WignerGrid w = wigner(wp);
    std::size_t f = 1;
    while (w.rows() / f > max_side && w.rows() % (2 * f) == 0) f *= 2;
    w = block_average(w, f);
    DataGrid g;
    g.rows = w.rows();
    g.cols = w.cols();
    g.bounds = {w.z_axis.front() * 1e9, w.z_axis.back() * 1e9, w.dk_axis.front() / q, w.dk_axis.back() / q};
    g.values = std::move(w.values);
    return g;
}

inline nlohmann::json trace_json(const RegimeLabel& l) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& e : l.trace) t.push_back(e.str());
    return t;
}

/// Summary fields shared by the manifest and sweep rows.
inline nlohmann::json run_summary(const RunResult& r) {
    using nlohmann::json;
    const Setup& s = r.setup;
    const SeriesPoint& f = r.final_point();
    json j;
    j["status"] = r.aborted ? "aborted" : "complete";
    if (r.aborted) j["abort_reason"] = r.abort_message;
    j["regime"] = r.label.name();
    j["regime_trace"] = trace_json(r.label);
    if (!r.label.note.empty()) j["regime_note"] = r.label.note;
    j["klein_cook_q"] = s.couplings.klein_cook_q;
    j["validity_ratio"] = s.validity.ratio;
    j["two_level_valid"] = s.validity.valid;
    j["rabi_frequency_ev"] = s.couplings.rabi_omega / constants::joules_per_ev;
    j["recoil_energy_ev"] = s.couplings.recoil_energy / constants::joules_per_ev;
    j["grating_period_nm"] = s.laser.grating_period * 1e9;
    j["phase_velocity_mismatch"] = s.phase_mismatch;
    j["beta"] = s.electron.beta;
    j["domain_nm"] = s.grid.length() * 1e9;
    j["n_points"] = s.grid.size();
    j["n_steps"] = r.n_steps;
    j["steps_completed"] = r.steps_completed;
    j["snapshot_every"] = r.snapshot_every;
    j["max_norm_drift"] = r.max_norm_drift;
    j["final_norm_drift"] = r.final_norm_drift;
    j["final_p_plus_half"] = f.p_plus;
    j["final_p_minus_half"] = f.p_minus;
    j["final_leakage"] = f.leakage;
    j["measured_split_rad_per_m"] = f.split;
    j["measured_split_single_lobe"] = f.single_lobe;
    j["usg_prediction_separation_rad_per_m"] = r.usg.separation;
    return j;
}

/// Writes every requested output into dir and returns the manifest (also written as manifest.json).
inline nlohmann::json write_outputs(const RunResult& r, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const double q = r.setup.laser.q;
    const ExperimentParams& p = r.params;

    nlohmann::json files = nlohmann::json::array();
    auto emit = [&](const std::string& name, const std::string& bytes) {
        write_file((dir / name).string(), bytes);
        files.push_back({{"name", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    };
    emit("config.conf", serialize(p));
    if (p.wants("spectrum")) emit("spectrum.csv", spectrum_csv(r.final_state, q));
    if (p.wants("populations")) emit("populations.csv", populations_csv(r.series));
    if (p.wants("record")) {
        emit("record.bin", encode_grid(r.spectrogram));
        if (p.wants("heatmaps")) emit("record.ppm", render_heatmap(r.spectrogram, {Scale::SymLog, ColorMap::Sequential}));
    }
    if (p.wants("wigner")) {
        const DataGrid w = wigner_data(r.final_state, q, 512);
        emit("wigner.bin", encode_grid(w));
        if (p.wants("heatmaps")) emit("wigner.ppm", render_heatmap(w, {Scale::Linear, ColorMap::Diverging}));
    }

    nlohmann::json m = run_summary(r);
    m["config"] = serialize(p);
    m["wall_clock_seconds"] = r.wall_seconds;
    m["partial_outputs"] = r.aborted;
    m["files"] = files;
    write_file((dir / "manifest.json").string(), m.dump(2) + "\n");
    return m;
}

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

/// Parses "key=v1,v2,...".
inline SweepAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError({"sweep axis '" + spec + "': expected key=v1,v2,..."});
    SweepAxis a;
    a.key = detail::trim(spec.substr(0, eq));
    std::stringstream ss(spec.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ',')) {
        v = detail::trim(v);
        if (!v.empty()) a.values.push_back(v);
    }
    if (a.values.empty()) throw ValidationError({"sweep axis '" + a.key + "': no values"});
    return a;
}

struct SweepOptions {
    std::size_t workers = 1;
    std::size_t cap = 64;
    bool classify_only = false;  // skip the time evolution; leakage and split stay empty
    std::function<void(const std::string&)> log;
};

struct SweepRow {
    std::size_t index = 0;
    std::vector<std::string> values;  // one per axis
    double klein_cook_q = 0.0;
    double validity_ratio = 0.0;
    std::optional<double> leakage;
    std::optional<double> split;
    std::string regime;
    std::string status = "ok";
};

inline std::vector<ExperimentParams> expand_sweep(const ExperimentParams& base, const std::vector<SweepAxis>& axes,
                                                  std::size_t cap, std::vector<std::vector<std::string>>* labels = nullptr) {
    std::size_t total = 1;
    bool over = false;
    for (const auto& a : axes) {
        if (a.values.empty()) throw ValidationError({"sweep axis '" + a.key + "': no values"});
        if (total > cap / a.values.size()) over = true;
        total *= a.values.size();
    }
    if (over || total > cap)
        throw ValidationError({"sweep has more points than the cap of " + std::to_string(cap) + "; raise --cap"});
    std::vector<ExperimentParams> out;
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < total; ++i) {
        ExperimentParams p = base;
        std::vector<std::string> vals;
        std::size_t rem = i;
        std::vector<std::size_t> digit(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            digit[k] = rem % axes[k].values.size();
            rem /= axes[k].values.size();
        }
        try {
            for (std::size_t k = 0; k < axes.size(); ++k) {
                set_field(p, axes[k].key, axes[k].values[digit[k]]);
                vals.push_back(axes[k].values[digit[k]]);
            }
            for (auto& msg : validation_problems(p)) problems.push_back("point " + std::to_string(i) + ": " + msg);
        } catch (const ValidationError& e) {
            for (const auto& msg : e.problems()) problems.push_back("point " + std::to_string(i) + ": " + msg);
        }
        out.push_back(std::move(p));
        if (labels) labels->push_back(std::move(vals));
    }
    if (!problems.empty()) throw ValidationError(problems);
    return out;
}

inline std::string sweep_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
    std::string out = "point";
    for (const auto& a : axes) out += "," + a.key;
    out += ",klein_cook_q,validity_ratio,leakage,split_rad_per_m,regime,status\n";
    for (const auto& r : rows) {
        out += std::to_string(r.index);
        for (const auto& v : r.values) out += "," + v;
        out += "," + detail::csv_num(r.klein_cook_q) + "," + detail::csv_num(r.validity_ratio) + "," +
               (r.leakage ? detail::csv_num(*r.leakage) : "") + "," + (r.split ? detail::csv_num(*r.split) : "") + "," +
               r.regime + "," + r.status + "\n";
    }
    return out;
}

/// Runs every point of the cartesian product (first axis slowest) and writes regime_map.csv.
inline std::vector<SweepRow> sweep(const ExperimentParams& base, const std::vector<SweepAxis>& axes,
                                   const std::filesystem::path& out_dir, const SweepOptions& opt = {}) {
    std::vector<std::vector<std::string>> labels;
    const auto points = expand_sweep(base, axes, opt.cap, &labels);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            SweepRow& row = rows[i];
            row.index = i;
            row.values = labels[i];
            try {
                const Setup s = resolve(points[i]);
                row.klein_cook_q = s.couplings.klein_cook_q;
                row.validity_ratio = s.validity.ratio;
                row.regime = classify_regime(points[i], s).name();
                if (!opt.classify_only) {
                    char name[32];
                    std::snprintf(name, sizeof name, "point_%04zu", i);
                    const RunResult r = simulate(points[i]);
                    write_outputs(r, out_dir / name);
                    row.leakage = r.final_point().leakage;
                    row.split = r.final_point().split;
                    if (r.aborted) row.status = "aborted";
                }
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
                for (auto& c : row.status)
                    if (c == ',' || c == '\n') c = ';';
            }
            if (opt.log) {
                std::lock_guard lock(log_mutex);
                opt.log("point " + std::to_string(i) + " " + row.regime + " " + row.status);
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(opt.workers, points.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    write_file((out_dir / "regime_map.csv").string(), sweep_csv(axes, rows));
    return rows;
}

}  // namespace feqo
