#include <gtest/gtest.h>

#include <cmath>

#include "feqo/wavepacket.hpp"

using namespace feqo;

namespace {

struct Fixture {
    ElectronParams e = electron_from_energy(100.0);
    LaserGratingParams l = make_laser(6.2, 4e-9, 1e8);
    Grid g{-2048e-9, 2048e-9, 4096};
};

double max_diff(const Wavepacket& a, const Wavepacket& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double peak_abs(const Wavepacket& a) {
    double m = 0.0;
    for (const auto& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(Grid, AxesAndSpacing) {
    const Grid g(-1.0, 1.0, 8);
    EXPECT_DOUBLE_EQ(g.d_xi(), 0.25);
    EXPECT_DOUBLE_EQ(g.xi(0), -1.0);
    EXPECT_DOUBLE_EQ(g.k(4), 0.0);
    EXPECT_NEAR(g.d_k(), constants::pi, 1e-15);
    EXPECT_EQ(g.k_index(0.0), 4u);
    EXPECT_EQ(g.k_index(-100.0), 0u);
    EXPECT_EQ(g.k_index(100.0), 7u);
    EXPECT_THROW(Grid(-1.0, 1.0, 12), DomainError);
    EXPECT_THROW(Grid(1.0, -1.0, 8), DomainError);
}

TEST(Wavepacket, NormalisedAndParseval) {
    Fixture f;
    const auto mom = make_gaussian(f.g, f.e, f.l, {});
    EXPECT_EQ(mom.representation(), Representation::Momentum);
    EXPECT_NEAR(mom.norm(), 1.0, 1e-13);
    EXPECT_NEAR(to_position(mom).norm(), 1.0, 1e-12);
}

TEST(Wavepacket, TransformRoundTrip) {
    Fixture f;
    WavepacketSpec spec;
    spec.superposition = Superposition{-0.5, {0.3, 0.7}};
    const auto mom = make_gaussian(f.g, f.e, f.l, spec);
    const auto back = to_momentum(to_position(mom));
    EXPECT_LT(max_diff(mom, back), 1e-12 * peak_abs(mom));
    EXPECT_THROW(to_position(to_position(mom)), DomainError);
    EXPECT_THROW(to_momentum(mom), DomainError);
}

TEST(Wavepacket, MomentAndPositionWidths) {
    Fixture f;
    const auto mom = make_gaussian(f.g, f.e, f.l, {});
    const auto mm = moments(mom);
    const double sigma = 0.02 * f.l.q;
    EXPECT_NEAR(mm.mean / f.l.q, 0.5, 1e-12);
    EXPECT_NEAR(mm.variance / (sigma * sigma), 1.0, 1e-9);
    const auto pm = moments(to_position(mom));
    const double sx = 1.0 / (2.0 * sigma);
    EXPECT_NEAR(pm.mean, 0.0, 1e-6 * sx);
    EXPECT_NEAR(pm.variance / (sx * sx), 1.0, 1e-9);
}

TEST(Wavepacket, ChirpIsAFreeDrift) {
    Fixture f;
    WavepacketSpec spec;
    spec.dk_offset = 0.0;
    const auto base = make_gaussian(f.g, f.e, f.l, spec);
    const double ld = 5e-5;
    const auto chirped = apply_chirp(base, ld, f.e);
    // momentum density is untouched
    for (std::size_t j = 0; j < base.data().size(); ++j)
        EXPECT_NEAR(std::norm(chirped.data()[j]), std::norm(base.data()[j]), 1e-15);
    // two drifts compose into one
    const auto twice = apply_chirp(apply_chirp(base, 2e-5, f.e), 3e-5, f.e);
    EXPECT_LT(max_diff(twice, chirped), 1e-12 * peak_abs(base));
    EXPECT_LT(max_diff(apply_chirp(chirped, -ld, f.e), base), 1e-12 * peak_abs(base));
    // position spread follows the free-particle law
    const double sigma = 0.02 * f.l.q;
    const double sx0 = 1.0 / (2.0 * sigma);
    const double t = ld / f.e.velocity();
    const double grow = constants::hbar * sigma * t / f.e.dispersion_mass();
    const auto pm = moments(to_position(chirped));
    EXPECT_NEAR(pm.variance / (sx0 * sx0 + grow * grow), 1.0, 1e-6);
    // spec.chirp_drift applies the same phase
    spec.chirp_drift = ld;
    EXPECT_LT(max_diff(make_gaussian(f.g, f.e, f.l, spec), chirped), 1e-14);
}

TEST(Wavepacket, SuperpositionWeights) {
    Fixture f;
    WavepacketSpec spec;
    spec.superposition = Superposition{-0.5, {2.0, 0.0}};
    const auto mom = make_gaussian(f.g, f.e, f.l, spec);
    EXPECT_NEAR(mom.norm(), 1.0, 1e-13);
    const double a = std::abs(mom.data()[f.g.k_index(0.5 * f.l.q)]);
    const double b = std::abs(mom.data()[f.g.k_index(-0.5 * f.l.q)]);
    EXPECT_NEAR(b / a, 2.0, 1e-9);
}

TEST(Wavepacket, TailChecks) {
    Fixture f;
    // domain too short for the position envelope
    EXPECT_THROW(make_gaussian(Grid(-32e-9, 32e-9, 64), f.e, f.l, {}), NumericalError);
    // momentum window too narrow for a component at +q/2
    EXPECT_THROW(make_gaussian(Grid(-2048e-9, 2048e-9, 256), f.e, f.l, {}), NumericalError);
    WavepacketSpec bad;
    bad.delta_k = 0.0;
    EXPECT_THROW(make_gaussian(f.g, f.e, f.l, bad), DomainError);
    WavepacketSpec cancel;
    cancel.dk_offset = 0.0;
    cancel.superposition = Superposition{0.0, {-1.0, 0.0}};
    EXPECT_THROW(make_gaussian(f.g, f.e, f.l, cancel), NumericalError);
}
