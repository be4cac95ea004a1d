#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "feqo/feqo.hpp"

using namespace feqo;
namespace fs = std::filesystem;

namespace {

ExperimentParams small() {
    ExperimentParams p;
    p.delta_k_over_q = 0.1;
    p.domain_nm = 256.0;
    p.n_points = 1024;
    p.t_total_ps = 0.05;
    p.n_steps = 200;
    p.spectrogram_rows = 16;
    return p;
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("feqo_unit_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

int cli(const std::string& args) {
    const std::string cmd = std::string(FEQO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Runner, SnapshotRule) {
    EXPECT_EQ(auto_snapshot_every(100, 1.0, 0.0), 1u);
    EXPECT_EQ(auto_snapshot_every(200000, 1.0, 0.0), 1000u);
    // a Rabi period spanning 3200 steps caps the stride at 100
    const double omega = constants::pi * constants::hbar / (3200.0 / 200000.0);
    EXPECT_EQ(auto_snapshot_every(200000, 1.0, omega), 100u);
}

TEST(Runner, SmallRunProducesSeriesAndSpectrogram) {
    const auto r = simulate(small());
    EXPECT_FALSE(r.aborted);
    EXPECT_EQ(r.n_steps, 200u);
    EXPECT_EQ(r.steps_completed, 200u);
    EXPECT_EQ(r.series.size(), 200u / r.snapshot_every + 1);
    EXPECT_LT(r.max_norm_drift, 1e-10);
    // a 0.1 q wide packet keeps erf(2.5 / sqrt 2) of its mass inside the +-0.25 q window
    EXPECT_NEAR(r.series.front().p_plus, std::erf(2.5 / std::sqrt(2.0)), 1e-3);
    EXPECT_LE(r.spectrogram.rows, 16u);
    EXPECT_EQ(r.spectrogram.values.size(), r.spectrogram.rows * r.spectrogram.cols);
    EXPECT_NEAR(r.spectrogram.bounds[2], -3.0, 0.01);
    EXPECT_NEAR(r.spectrogram.bounds[1], 0.05, 1e-9);
    const auto& f = r.final_point();
    EXPECT_NEAR(f.p_plus + f.p_minus + f.leakage, 1.0, 1e-12);
    EXPECT_GT(f.p_minus, 0.0);
}

TEST(Runner, ZeroFieldLeavesSpectrumUnchanged) {
    auto p = small();
    p.e0_v_per_m = 0.0;
    const auto r = simulate(p);
    const auto a = spectrum(r.initial);
    const auto b = spectrum(r.final_state);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.density.size(); ++i)
        worst = std::max(worst, std::abs(a.density[i] - b.density[i]) * r.setup.laser.q);
    EXPECT_LT(worst, 1e-10);
}

TEST(Runner, OutputsAreReproducible) {
    const auto d1 = scratch("rep1"), d2 = scratch("rep2");
    const auto m1 = write_outputs(simulate(small()), d1);
    const auto m2 = write_outputs(simulate(small()), d2);
    EXPECT_EQ(m1["files"], m2["files"]);
    for (const auto& f : m1["files"]) {
        const std::string name = f["name"];
        const std::string bytes = slurp(d1 / name);
        EXPECT_EQ(bytes, slurp(d2 / name)) << name;
        EXPECT_EQ(sha256_hex(bytes), f["sha256"].get<std::string>()) << name;
    }
    for (const char* n : {"config.conf", "spectrum.csv", "populations.csv", "record.bin", "record.ppm", "wigner.bin",
                          "wigner.ppm", "manifest.json"})
        EXPECT_TRUE(fs::exists(d1 / n)) << n;
    auto a = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    auto b = nlohmann::json::parse(slurp(d2 / "manifest.json"));
    a.erase("wall_clock_seconds");
    b.erase("wall_clock_seconds");
    EXPECT_EQ(a, b);
    EXPECT_EQ(parse_config_text(slurp(d1 / "config.conf")), small());
    EXPECT_FALSE(a["partial_outputs"].get<bool>());
}

TEST(Runner, OutputSelectionIsHonoured) {
    auto p = small();
    p.outputs = {"spectrum"};
    const auto d = scratch("sel");
    const auto m = write_outputs(simulate(p), d);
    EXPECT_EQ(m["files"].size(), 2u);
    EXPECT_FALSE(fs::exists(d / "wigner.bin"));
}

TEST(Runner, AbortWritesPartialOutputs) {
    auto p = small();
    p.symmetrize = false;
    p.norm_tolerance = 1e-300;
    const auto r = simulate(p);
    ASSERT_TRUE(r.aborted);
    EXPECT_LT(r.steps_completed, r.n_steps);
    const auto m = write_outputs(r, scratch("abort"));
    EXPECT_TRUE(m["partial_outputs"].get<bool>());
}

TEST(Sweep, ExpansionOrderAndCap) {
    const std::vector<SweepAxis> axes = {parse_axis("laser.e0_v_per_m=1e8,2e8"),
                                         parse_axis("wavepacket.delta_k_over_q = 0.05, 0.1, 0.2")};
    std::vector<std::vector<std::string>> labels;
    const auto pts = expand_sweep(small(), axes, 64, &labels);
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(labels[1], (std::vector<std::string>{"1e8", "0.1"}));
    EXPECT_DOUBLE_EQ(pts[3].e0_v_per_m, 2e8);
    EXPECT_DOUBLE_EQ(pts[3].delta_k_over_q, 0.05);
    EXPECT_THROW(expand_sweep(small(), axes, 5), ValidationError);
    EXPECT_EQ(expand_sweep(small(), {}, 1).size(), 1u);
    EXPECT_THROW(parse_axis("laser.e0_v_per_m"), ValidationError);
    EXPECT_THROW(parse_axis("laser.e0_v_per_m="), ValidationError);
    EXPECT_THROW(expand_sweep(small(), {parse_axis("grid.n_points=100")}, 4), ValidationError);
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
    const std::vector<SweepAxis> axes = {parse_axis("laser.e0_v_per_m=0.5e8,1e8,2e8")};
    SweepOptions one, two;
    two.workers = 2;
    const auto d1 = scratch("sw1"), d2 = scratch("sw2");
    const auto a = sweep(small(), axes, d1, one);
    const auto b = sweep(small(), axes, d2, two);
    EXPECT_EQ(sweep_csv(axes, a), sweep_csv(axes, b));
    EXPECT_EQ(slurp(d1 / "regime_map.csv"), slurp(d2 / "regime_map.csv"));
    EXPECT_EQ(slurp(d1 / "point_0002" / "record.bin"), slurp(d2 / "point_0002" / "record.bin"));
}

TEST(Sweep, ClassifyOnlySkipsTheSolver) {
    SweepOptions o;
    o.classify_only = true;
    const auto d = scratch("cls");
    const auto rows = sweep(preset("fig2a"), {parse_axis("wavepacket.delta_k_over_q=0.02,0.15,1.2")}, d, o);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].regime, "Bragg");
    EXPECT_EQ(rows[1].regime, "AnomalousBragg");
    EXPECT_EQ(rows[2].regime, "DLA");
    EXPECT_FALSE(rows[0].leakage.has_value());
    EXPECT_TRUE(fs::exists(d / "regime_map.csv"));
    EXPECT_FALSE(fs::exists(d / "point_0000"));
}

TEST(Cli, ExitCodes) {
    const auto d = scratch("cli");
    std::ofstream(d / "bad_syntax.conf") << "electron.kinetic_energy_ev 100\n";
    std::ofstream(d / "bad_value.conf") << "grid.n_points = -4\n";
    std::ofstream(d / "good.conf") << serialize(small());
    EXPECT_EQ(cli("validate " + (d / "good.conf").string()), 0);
    EXPECT_EQ(cli("validate " + (d / "bad_syntax.conf").string()), 4);
    EXPECT_EQ(cli("validate " + (d / "bad_value.conf").string()), 1);
    EXPECT_EQ(cli("validate " + (d / "missing.conf").string()), 3);
    EXPECT_EQ(cli("validate fig2a"), 0);
    EXPECT_EQ(cli("preset nope --emit-config"), 1);
    EXPECT_EQ(cli("frobnicate"), 1);
    EXPECT_EQ(cli("render " + (d / "missing.bin").string() + " -o " + (d / "x.ppm").string()), 3);
    EXPECT_EQ(cli("sweep " + (d / "good.conf").string() + " --axis laser.e0_v_per_m=1,2,3 --cap 2 --out " +
                  (d / "sw").string()),
              1);
}

TEST(Cli, RunThenRender) {
    const auto d = scratch("cli_run");
    std::ofstream(d / "small.conf") << serialize(small());
    ASSERT_EQ(cli("run " + (d / "small.conf").string() + " --out " + (d / "out").string()), 0);
    EXPECT_TRUE(fs::exists(d / "out" / "manifest.json"));
    ASSERT_EQ(cli("render " + (d / "out" / "record.bin").string() + " --log -o " + (d / "r.ppm").string()), 0);
    const auto img = parse_ppm(slurp(d / "r.ppm"));
    const auto g = read_grid((d / "out" / "record.bin").string());
    EXPECT_EQ(img.width, g.cols);
    EXPECT_EQ(img.height, g.rows);
    EXPECT_EQ(slurp(d / "r.ppm"), slurp(d / "out" / "record.ppm"));
}

TEST(Cli, EmitConfigRoundTrips) {
    const auto d = scratch("emit");
    const std::string cmd = std::string(FEQO_CLI_PATH) + " preset fig3 --emit-config > " + (d / "fig3.conf").string();
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_EQ(parse_config((d / "fig3.conf").string()), preset("fig3"));
}
