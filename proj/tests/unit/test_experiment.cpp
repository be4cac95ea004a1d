#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "feqo/experiment.hpp"
#include "feqo/presets.hpp"

using namespace feqo;

namespace {

bool mentions(const ValidationError& e, const std::string& needle) {
    return std::any_of(e.problems().begin(), e.problems().end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, DefaultsParseFromEmptyText) {
    EXPECT_EQ(parse_config_text(""), ExperimentParams{});
    EXPECT_EQ(parse_config_text("# only a comment\n\n   \n"), ExperimentParams{});
}

TEST(Config, SerializeRoundTripsEveryPreset) {
    for (const auto& item : preset_catalog()) {
        const auto p = preset(item.name);
        EXPECT_EQ(parse_config_text(serialize(p)), p) << item.name;
    }
}

TEST(Config, ParsesValuesAndComments) {
    const auto p = parse_config_text(
        "electron.kinetic_energy_ev = 250   # slow\n"
        "laser.theta_rad = -pi/2\n"
        "grating.period_nm = auto\n"
        "laser.gradient.kind = linear\n"
        "laser.gradient.clamp = extend\n"
        "wavepacket.superposition.dk_offset_over_q = -0.5\n"
        "evolution.n_steps = 1200\n"
        "evolution.boundary = dirichlet\n"
        "outputs = spectrum, populations\n");
    EXPECT_DOUBLE_EQ(p.kinetic_energy_ev, 250.0);
    EXPECT_DOUBLE_EQ(p.theta_rad, -constants::pi / 2.0);
    EXPECT_FALSE(p.period_nm.has_value());
    EXPECT_TRUE(p.gradient.enabled);
    EXPECT_TRUE(p.gradient.extend);
    EXPECT_EQ(p.superposition_dk_offset_over_q, -0.5);
    EXPECT_EQ(p.n_steps, 1200);
    EXPECT_EQ(p.boundary, Boundary::Dirichlet);
    EXPECT_TRUE(p.wants("spectrum"));
    EXPECT_FALSE(p.wants("wigner"));
    EXPECT_TRUE(parse_config_text("outputs = none\n").outputs.empty());
}

TEST(Config, AngleForms) {
    auto theta = [](const std::string& v) { return parse_config_text("laser.theta_rad = " + v + "\n").theta_rad; };
    EXPECT_DOUBLE_EQ(theta("pi"), constants::pi);
    EXPECT_DOUBLE_EQ(theta("-pi"), -constants::pi);
    EXPECT_DOUBLE_EQ(theta("pi/2"), constants::pi / 2.0);
    EXPECT_DOUBLE_EQ(theta("3*pi/4"), 0.75 * constants::pi);
    EXPECT_DOUBLE_EQ(theta("0.5 pi"), 0.5 * constants::pi);
    EXPECT_DOUBLE_EQ(theta("1.25"), 1.25);
    EXPECT_THROW(theta("pi/0"), ValidationError);
    EXPECT_THROW(theta("tau"), ValidationError);
}

TEST(Config, BetaSetsKineticEnergy) {
    const auto p = parse_config_text("electron.beta = 0.05\n");
    EXPECT_NEAR(electron_from_energy(p.kinetic_energy_ev).beta, 0.05, 1e-14);
    EXPECT_THROW(parse_config_text("electron.beta = 1.5\n"), ValidationError);
}

TEST(Config, SyntaxErrorsCarryTheLine) {
    try {
        parse_config_text("electron.kinetic_energy_ev = 100\n\nthis line has no equals sign\n");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    EXPECT_THROW(parse_config_text("= 4\n"), SyntaxError);
    EXPECT_THROW(parse_config_text("grid n_points = 4\n"), SyntaxError);
}

TEST(Config, ProblemsAreAggregated) {
    try {
        parse_config_text("grid.bogus = 1\nlaser.e0_v_per_m = strong\ngrid.n_points = 8\ngrid.n_points = 16\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.problems().size(), 3u);
        EXPECT_TRUE(mentions(e, "line 1: grid.bogus: unknown key"));
        EXPECT_TRUE(mentions(e, "line 2: laser.e0_v_per_m"));
        EXPECT_TRUE(mentions(e, "duplicate key"));
    }
}

TEST(Config, RangeChecksNameTheField) {
    try {
        validate(parse_config_text("grid.n_points = -64\n"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_TRUE(mentions(e, "grid.n_points"));
    }
    ExperimentParams p;
    p.n_points = 1000;
    p.t_total_ps = 0.0;
    p.window_half_width_over_q = 0.3;
    const auto probs = validation_problems(p);
    EXPECT_EQ(probs.size(), 3u);
    EXPECT_THROW(resolve(p), ValidationError);
}

TEST(Config, MissingFileIsAnIoError) {
    EXPECT_THROW(parse_config("/nonexistent/dir/none.conf"), IoError);
}

TEST(Config, SetFieldOverridesOneKey) {
    ExperimentParams p;
    set_field(p, "laser.e0_v_per_m", "2e8");
    EXPECT_DOUBLE_EQ(p.e0_v_per_m, 2e8);
    set_field(p, "grating.period_nm", "auto");
    EXPECT_FALSE(p.period_nm.has_value());
    set_field(p, "electron.beta", "0.05");
    EXPECT_NEAR(electron_from_energy(p.kinetic_energy_ev).beta, 0.05, 1e-14);
    EXPECT_THROW(set_field(p, "laser.nonsense", "1"), ValidationError);
    EXPECT_THROW(set_field(p, "grid.n_points", "many"), ValidationError);
}

TEST(Setup, PhaseMatchedPeriodWhenAuto) {
    auto p = ExperimentParams{};
    p.period_nm.reset();
    const auto s = resolve(p);
    EXPECT_NEAR(s.laser.grating_period * 1e9, 3.95563, 1e-4);
    EXPECT_NEAR(s.phase_mismatch, 0.0, 1e-12);
    const auto fixed = resolve(ExperimentParams{});
    EXPECT_NEAR(fixed.phase_mismatch, 0.01122, 1e-4);
}

TEST(Setup, DefaultDomainCoversThePacket) {
    const auto s = resolve(ExperimentParams{});
    const double sigma_z = 1.0 / (2.0 * 0.02 * s.laser.q);
    EXPECT_GE(s.grid.length(), 16.0 * 2.3548 * sigma_z);
    EXPECT_GE(s.grid.length(), 64 * 4e-9 * (1 - 1e-12));
    const double periods = s.grid.length() / 4e-9;
    EXPECT_NEAR(std::exp2(std::round(std::log2(periods))), periods, 1e-6);
}

TEST(Setup, GradientUsesTheCentralField) {
    const auto s = resolve(preset("fig2d"));
    EXPECT_TRUE(s.profile.has_gradient());
    EXPECT_NEAR(s.profile.e0_central, 1e8, 1e-3);
    EXPECT_NEAR(s.couplings.klein_cook_q, 1.49294, 1e-4);
}

TEST(Presets, RegimeAtlas) {
    const std::vector<std::pair<std::string, Regime>> expect = {
        {"fig2a", Regime::Bragg},         {"fig2c", Regime::UltrafastSternGerlach},
        {"fig2d", Regime::UltrafastSternGerlach}, {"fig3", Regime::AnomalousBragg},
        {"s1_off", Regime::AnomalousBragg}, {"s2", Regime::RamanNathPINEM},
        {"s3", Regime::DLA},              {"s4", Regime::APINEM}};
    for (const auto& [name, regime] : expect) EXPECT_EQ(classify_regime(preset(name)).regime, regime) << name;
}

TEST(Presets, SlowFastContrast) {
    const auto s2 = resolve(preset("s2"));
    EXPECT_NEAR(s2.electron.beta, 0.05, 1e-12);
    EXPECT_NEAR(s2.couplings.klein_cook_q, 0.0944, 1e-3);
    EXPECT_NEAR(s2.validity.ratio, 21.18, 0.05);
}

TEST(Presets, UnknownNameListsKnownOnes) {
    try {
        preset("fig9");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_TRUE(mentions(e, "fig2a"));
    }
}
