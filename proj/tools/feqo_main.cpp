#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feqo/feqo.hpp"

namespace {

enum Exit : int { Ok = 0, Validation = 1, Solver = 2, Io = 3, Syntax = 4 };

// A config argument is a file path; a bare preset name is accepted when no such file exists.
feqo::ExperimentParams load(const std::string& arg) {
    if (!std::filesystem::exists(arg)) {
        for (const auto& p : feqo::preset_catalog())
            if (p.name == arg) return feqo::preset(arg);
    }
    return feqo::parse_config(arg);
}

std::string stem_of(const std::string& arg) {
    const std::string s = std::filesystem::path(arg).stem().string();
    return s.empty() ? "run" : s;
}

void print_summary(const feqo::ExperimentParams& p, const feqo::Setup& s, const feqo::RegimeLabel& l) {
    std::printf("grating period      %.6g nm%s\n", s.laser.grating_period * 1e9, p.period_nm ? "" : " (phase matched)");
    std::printf("phase mismatch      %.4g\n", s.phase_mismatch);
    std::printf("beta                %.8g\n", s.electron.beta);
    std::printf("Rabi frequency      %.6g eV\n", s.couplings.rabi_omega / feqo::constants::joules_per_ev);
    std::printf("recoil energy       %.6g eV\n", s.couplings.recoil_energy / feqo::constants::joules_per_ev);
    std::printf("Klein-Cook Q        %.6g\n", s.couplings.klein_cook_q);
    std::printf("validity ratio r    %.6g (%s)\n", s.validity.ratio, s.validity.valid ? "two-level valid" : "beyond two-level bound");
    std::printf("grid                %zu points over %.6g nm\n", s.grid.size(), s.grid.length() * 1e9);
    std::printf("regime              %s\n", l.name());
    for (const auto& t : l.trace) std::printf("  %s\n", t.str().c_str());
    if (!l.note.empty()) std::printf("  note: %s\n", l.note.c_str());
}

int run_and_write(const feqo::ExperimentParams& p, const std::filesystem::path& out) {
    feqo::RunOptions opt;
    std::size_t last = 0;
    opt.progress = [&](std::size_t step, std::size_t total) {
        const std::size_t pct = total ? 100 * step / total : 100;
        if (pct >= last + 10 || step == total) {
            std::fprintf(stderr, "\r%3zu%%", pct);
            last = pct;
        }
    };
    const feqo::RunResult r = feqo::simulate(p, opt);
    std::fprintf(stderr, "\n");
    const auto m = feqo::write_outputs(r, out);
    print_summary(p, r.setup, r.label);
    const auto& f = r.final_point();
    std::printf("steps               %zu of %zu\n", r.steps_completed, r.n_steps);
    std::printf("max norm drift      %.3g\n", r.max_norm_drift);
    std::printf("final p(+q/2)       %.6f\n", f.p_plus);
    std::printf("final p(-q/2)       %.6f\n", f.p_minus);
    std::printf("final leakage       %.6f\n", f.leakage);
    std::printf("split (+q/2 window) %.6g rad/m%s\n", f.split, f.single_lobe ? " (single lobe)" : "");
    std::printf("outputs             %s (%zu files)\n", out.string().c_str(), m["files"].size());
    std::printf("wall clock          %.1f s\n", r.wall_seconds);
    if (r.aborted) {
        std::fprintf(stderr, "solver aborted: %s (partial outputs written)\n", r.abort_message.c_str());
        return Solver;
    }
    return Ok;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const feqo::SyntaxError& e) {
        std::fprintf(stderr, "syntax error: %s\n", e.what());
        return Syntax;
    } catch (const feqo::ValidationError& e) {
        std::fprintf(stderr, "invalid configuration:\n");
        for (const auto& p : e.problems()) std::fprintf(stderr, "  %s\n", p.c_str());
        return Validation;
    } catch (const feqo::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return Io;
    } catch (const feqo::SolverAbort& e) {
        std::fprintf(stderr, "solver aborted: %s\n", e.what());
        return Solver;
    } catch (const feqo::Error& e) {
        // domain and numerical-setup errors come from inputs the solver cannot represent
        std::fprintf(stderr, "error: %s\n", e.what());
        return Validation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return Io;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slow-electron grating diffraction simulator"};
    app.require_subcommand(1);
    int code = Ok;

    auto* run = app.add_subcommand("run", "Run a configuration file and write outputs");
    std::string run_cfg, run_out;
    run->add_option("config", run_cfg, "Configuration file (or a preset name)")->required();
    run->add_option("--out", run_out, "Output directory (default out/<config stem>)");
    run->callback([&] {
        code = guarded([&] {
            const auto p = load(run_cfg);
            return run_and_write(p, run_out.empty() ? std::filesystem::path("out") / stem_of(run_cfg) : std::filesystem::path(run_out));
        });
    });

    auto* pre = app.add_subcommand("preset", "Run a built-in preset or print its configuration");
    std::string pre_name, pre_out;
    bool emit = false, list = false;
    pre->add_option("name", pre_name, "Preset name");
    pre->add_flag("--emit-config", emit, "Print the preset as configuration text and exit");
    pre->add_flag("--list", list, "List presets");
    pre->add_option("--out", pre_out, "Output directory (default out/<name>)");
    pre->callback([&] {
        code = guarded([&] {
            if (list || pre_name.empty()) {
                for (const auto& i : feqo::preset_catalog()) std::printf("%-18s %s\n", i.name.c_str(), i.summary.c_str());
                return pre_name.empty() && !list ? static_cast<int>(Validation) : static_cast<int>(Ok);
            }
            const auto p = feqo::preset(pre_name);
            if (emit) {
                std::fputs(feqo::serialize(p).c_str(), stdout);
                return static_cast<int>(Ok);
            }
            return run_and_write(p, pre_out.empty() ? std::filesystem::path("out") / pre_name : std::filesystem::path(pre_out));
        });
    });

    auto* sw = app.add_subcommand("sweep", "Run the cartesian product of parameter axes");
    std::string sw_cfg, sw_out;
    std::vector<std::string> axes;
    std::size_t workers = 1, cap = 64;
    bool classify_only = false;
    sw->add_option("config", sw_cfg, "Base configuration file (or a preset name)")->required();
    sw->add_option("--axis", axes, "key=v1,v2,... (repeatable)");
    sw->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber);
    sw->add_option("--cap", cap, "Maximum number of points")->check(CLI::PositiveNumber);
    sw->add_option("--out", sw_out, "Output directory (default out/sweep_<config stem>)");
    sw->add_flag("--classify-only", classify_only, "Classify every point without running the solver");
    sw->callback([&] {
        code = guarded([&] {
            const auto base = load(sw_cfg);
            std::vector<feqo::SweepAxis> parsed;
            for (const auto& a : axes) parsed.push_back(feqo::parse_axis(a));
            feqo::SweepOptions opt;
            opt.workers = workers;
            opt.cap = cap;
            opt.classify_only = classify_only;
            opt.log = [](const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); };
            const std::filesystem::path out =
                sw_out.empty() ? std::filesystem::path("out") / ("sweep_" + stem_of(sw_cfg)) : std::filesystem::path(sw_out);
            const auto rows = feqo::sweep(base, parsed, out, opt);
            std::fputs(feqo::sweep_csv(parsed, rows).c_str(), stdout);
            for (const auto& r : rows)
                if (r.status != "ok") return static_cast<int>(Solver);
            return static_cast<int>(Ok);
        });
    });

    auto* rd = app.add_subcommand("render", "Render a binary grid file as a PPM heatmap");
    std::string rd_in, rd_out, rd_map = "auto";
    bool rd_log = false;
    rd->add_option("grid", rd_in, "Grid file")->required();
    rd->add_option("-o,--output", rd_out, "Output .ppm")->required();
    rd->add_flag("--log", rd_log, "Symmetric-log normalization");
    rd->add_option("--colormap", rd_map, "auto, sequential or diverging")
        ->check(CLI::IsMember({"auto", "sequential", "diverging"}));
    rd->callback([&] {
        code = guarded([&] {
            const auto g = feqo::read_grid(rd_in);
            feqo::HeatmapOptions o;
            o.scale = rd_log ? feqo::Scale::SymLog : feqo::Scale::Linear;
            o.colormap = rd_map == "sequential" ? feqo::ColorMap::Sequential
                         : rd_map == "diverging" ? feqo::ColorMap::Diverging
                                                 : feqo::ColorMap::Auto;
            feqo::write_file(rd_out, feqo::render_heatmap(g, o));
            return static_cast<int>(Ok);
        });
    });

    auto* va = app.add_subcommand("validate", "Check a configuration and print derived quantities");
    std::string va_cfg;
    va->add_option("config", va_cfg, "Configuration file (or a preset name)")->required();
    va->callback([&] {
        code = guarded([&] {
            const auto p = load(va_cfg);
            const auto s = feqo::resolve(p);
            print_summary(p, s, feqo::classify_regime(p, s));
            return static_cast<int>(Ok);
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Validation;
    }
    return code;
}
