#include <gtest/gtest.h>

#include "feqo/regime.hpp"

using namespace feqo;

namespace {

RegimeInputs slow_bragg() {
    RegimeInputs in;
    in.beta = 0.0198;
    in.wavelength = 200e-9;
    in.q = constants::two_pi / 4e-9;
    in.delta_k = 0.02 * in.q;
    in.klein_cook_q = 1.49;
    in.validity_ratio = 1.34;
    return in;
}

Regime classify(const RegimeInputs& in, const RegimeThresholds& th = {}) { return classify_regime(in, th).regime; }

}  // namespace

TEST(Regime, Atlas) {
    auto in = slow_bragg();
    EXPECT_EQ(classify(in), Regime::Bragg);
    in.has_gradient = true;
    EXPECT_EQ(classify(in), Regime::UltrafastSternGerlach);
    in.delta_k = 0.15 * in.q;
    EXPECT_EQ(classify(in), Regime::AnomalousBragg);

    in = slow_bragg();
    in.klein_cook_q = 0.09;
    EXPECT_EQ(classify(in), Regime::RamanNathPINEM);

    in = slow_bragg();
    in.beta = 0.7;
    in.delta_k = 0.0005 * in.q;  // plane wave on the fast scale beta lambda
    EXPECT_EQ(classify(in), Regime::RamanNathPINEM);

    in = slow_bragg();
    in.delta_k = 1.2 * in.q;
    EXPECT_EQ(classify(in), Regime::DLA);
    in.chirp_drift = 0.1;
    EXPECT_EQ(classify(in), Regime::APINEM);
}

TEST(Regime, BroadeningNeverReturnsToBragg) {
    auto in = slow_bragg();
    int last = 0;
    auto rank = [](Regime r) {
        switch (r) {
            case Regime::Bragg: return 0;
            case Regime::AnomalousBragg: return 1;
            case Regime::DLA: return 2;
            default: return -1;
        }
    };
    for (double dk = 0.005; dk < 3.0; dk *= 1.1) {
        in.delta_k = dk * in.q;
        const int r = rank(classify(in));
        ASSERT_GE(r, 0) << dk;
        EXPECT_GE(r, last) << dk;
        last = r;
    }
    EXPECT_EQ(last, 2);
}

TEST(Regime, InvalidInputsAreIndeterminate) {
    auto in = slow_bragg();
    in.beta = 0.0;
    auto l = classify_regime(in);
    EXPECT_EQ(l.regime, Regime::Indeterminate);
    EXPECT_FALSE(l.note.empty());
    in = slow_bragg();
    in.delta_k = NAN;
    EXPECT_EQ(classify(in), Regime::Indeterminate);
    in = slow_bragg();
    in.chirp_drift = -1.0;
    EXPECT_EQ(classify(in), Regime::Indeterminate);
    RegimeThresholds th;
    th.point_particle_factor = 5.0;
    EXPECT_EQ(classify(slow_bragg(), th), Regime::Indeterminate);
}

TEST(Regime, ThresholdOverrides) {
    auto in = slow_bragg();
    in.delta_k = 0.15 * in.q;
    RegimeThresholds th;
    th.anomalous_dk_over_q = 0.2;
    EXPECT_EQ(classify(in, th), Regime::Bragg);
    th = {};
    th.klein_cook_min = 2.0;
    EXPECT_EQ(classify(slow_bragg(), th), Regime::RamanNathPINEM);
    th = {};
    th.beta_fast = 0.01;
    EXPECT_EQ(classify(slow_bragg(), th), Regime::RamanNathPINEM);
}

TEST(Regime, TraceNamesEveryDecision) {
    const auto l = classify_regime(slow_bragg());
    ASSERT_FALSE(l.trace.empty());
    bool saw_q = false;
    for (const auto& t : l.trace) {
        if (t.quantity == "klein_cook_Q") {
            saw_q = true;
            EXPECT_TRUE(t.holds);
            EXPECT_NE(t.str().find(">="), std::string::npos);
        }
    }
    EXPECT_TRUE(saw_q);
    EXPECT_STREQ(regime_name(Regime::UltrafastSternGerlach), "UltrafastSternGerlach");
}

TEST(Regime, ChirpedSize) {
    EXPECT_DOUBLE_EQ(chirped_size(1e-9, 0.0, 0.02, constants::electron_mass), 1e-9);
    const double s = chirped_size(1e-9, 0.01, 0.02, constants::electron_mass);
    const double t = 0.01 / (0.02 * constants::speed_of_light);
    const double a = constants::hbar * t / (2.0 * constants::electron_mass * 1e-18);
    EXPECT_NEAR(s / (1e-9 * std::sqrt(1 + a * a)), 1.0, 1e-12);
}
