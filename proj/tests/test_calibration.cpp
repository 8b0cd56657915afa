#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "starkzz/calibration.hpp"
#include "starkzz/errors.hpp"

using namespace starkzz;
using std::numbers::pi;

namespace {

RSweepConfig pair2_config() {
    RSweepConfig c;
    c.sys = reference_pair_2();
    c.crosstalk = {CrosstalkMatrix::identity(), 1.0};
    c.shape = PulseShape{201.0, 0.4};
    c.phi_d = pi;
    c.jobs = 1;
    return c;
}

LocalZCurve cosine_curve(double peak, double sign, int n = 32) {
    LocalZCurve c;
    for (int k = 0; k < n; ++k) {
        const double phi = 2.0 * pi * k / n;
        c.phases.push_back(phi);
        c.values.push_back(sign * 0.9 * std::cos(phi - peak) + 0.02);
    }
    return c;
}

}  // namespace

TEST(GateAlgebra, IdealCz) {
    const auto cz = ideal_cz();
    EXPECT_NEAR(std::abs(wrap_phase(conditional_phase(cz)) - pi), 0.0, 1e-15);
    EXPECT_NEAR(average_gate_fidelity(cz, cz), 1.0, 1e-15);
    const Matrix4c phased = std::polar(1.0, 0.77) * cz;
    EXPECT_NEAR(average_gate_fidelity(phased, cz), 1.0, 1e-15);
    EXPECT_NEAR(average_gate_fidelity(Matrix4c::Identity(), cz), (4.0 + 4.0) / 20.0, 1e-15);
}

TEST(GateAlgebra, VirtualZ) {
    const auto zc = virtual_z(Qubit::control, 0.5);
    EXPECT_NEAR(std::abs(zc(2, 2) - std::polar(1.0, 0.5)), 0.0, 1e-15);
    EXPECT_EQ(zc(1, 1), cplx(1.0));
    const auto zt = virtual_z(Qubit::target, 0.5);
    EXPECT_NEAR(std::abs(zt(1, 1) - std::polar(1.0, 0.5)), 0.0, 1e-15);
    EXPECT_EQ(zt(2, 2), cplx(1.0));
    // local Z rotations do not change the conditional phase
    EXPECT_NEAR(conditional_phase(zc * zt * ideal_cz()), conditional_phase(ideal_cz()), 1e-14);
}

TEST(LocalZ, RecoversKnownOffset) {
    EXPECT_NEAR(calibrate_local_z(cosine_curve(0.7, 1.0), cosine_curve(0.7, -1.0)), 0.7, 1e-6);
}

TEST(LocalZ, AveragesSymmetricOffsets) {
    for (double delta : {0.05, 0.2}) {
        EXPECT_NEAR(calibrate_local_z(cosine_curve(0.7 + delta, 1.0), cosine_curve(0.7 - delta, -1.0)),
                    0.7, 1e-9);
    }
}

TEST(LocalZ, Errors) {
    auto flat0 = cosine_curve(0.7, 1.0);
    for (auto& v : flat0.values) v *= 0.05;
    EXPECT_THROW(calibrate_local_z(flat0, cosine_curve(0.7, -1.0)), LowContrast);
    EXPECT_THROW(calibrate_local_z(cosine_curve(0.7, 1.0, 8), cosine_curve(0.7, -1.0, 8)), InsufficientData);
    auto half = cosine_curve(0.7, 1.0);
    for (auto& p : half.phases) p *= 0.5;
    EXPECT_THROW(calibrate_local_z(half, cosine_curve(0.7, -1.0)), InsufficientData);
}

TEST(LocalZ, SimulatedCurvesOnIdealGate) {
    // CZ followed by unknown local phases; calibration undoes them.
    const Matrix4c u = virtual_z(Qubit::control, -0.4) * virtual_z(Qubit::target, 1.1) * ideal_cz();
    std::vector<double> phases;
    for (int k = 0; k < 32; ++k) phases.push_back(2.0 * pi * k / 32);
    const double zi = calibrate_local_z(simulate_local_z_curve(u, Qubit::control, 0, phases),
                                        simulate_local_z_curve(u, Qubit::control, 1, phases));
    const double iz = calibrate_local_z(simulate_local_z_curve(u, Qubit::target, 0, phases),
                                        simulate_local_z_curve(u, Qubit::target, 1, phases));
    EXPECT_NEAR(wrap_phase(zi - 0.4), 0.0, 1e-9);
    EXPECT_NEAR(wrap_phase(iz + 1.1), 0.0, 1e-9);
    const Matrix4c fixed = virtual_z(Qubit::control, zi) * virtual_z(Qubit::target, iz) * u;
    EXPECT_NEAR(average_gate_fidelity(fixed, ideal_cz()), 1.0, 1e-12);
}

TEST(RBand, LongestContiguousRun) {
    RMap m;
    m.amplitudes = {1.0, 2.0};
    m.drive_freqs = {10.0, 20.0, 30.0, 40.0, 50.0, 60.0};
    m.r.resize(6, 2);
    m.r << 1.95, 0.1,   // 10
        0.2, 0.3,       // 20
        1.0, 1.91,      // 30
        1.92, 1.0,      // 40
        std::numeric_limits<double>::quiet_NaN(), 1.97,  // 50
        0.5, 0.5;       // 60
    const auto band = r_band(m, 1.9);
    EXPECT_DOUBLE_EQ(band.lo, 30.0);
    EXPECT_DOUBLE_EQ(band.hi, 50.0);
    EXPECT_DOUBLE_EQ(band.width(), 20.0);
    EXPECT_EQ(m.flagged_count(), 1u);
    EXPECT_DOUBLE_EQ(m.max_over_amplitude(4), 1.97);
}

TEST(RMapCsv, FormatAndOrder) {
    RMap m;
    m.amplitudes = {0.5, 1.0};
    m.drive_freqs = {5275.0};
    m.r.resize(1, 2);
    m.r << 0.123456789012345, std::numeric_limits<double>::quiet_NaN();
    std::ostringstream os;
    write_rmap_csv(m, os);
    EXPECT_EQ(os.str(), "a,freq_mhz,r_value\n0.5,5275,0.123456789012\n1,5275,nan\n");
}

TEST(SweepR, ZeroAmplitudeIsStaticPhaseOnly) {
    auto cfg = pair2_config();
    const double r = r_at(cfg, 0.0, cfg.sys.target.freq_01 - 40.0);
    EXPECT_LT(r, 0.05);
    EXPECT_GT(r, 0.02);
}

TEST(SweepR, CancellationContourAtLowAmplitude) {
    auto cfg = pair2_config();
    for (double a = 1.0; a <= 9.0; a += 1.0) cfg.amplitudes.push_back(a);
    cfg.drive_freqs = {cfg.sys.target.freq_01 - 40.0};
    const auto map = sweep_r(cfg);
    EXPECT_EQ(map.flagged_count(), 0u);
    EXPECT_LT(map.r.minCoeff(), 0.02);
}

TEST(CalibrateCz, ZeroAmplitudeFails) {
    auto cfg = pair2_config();
    cfg.amplitudes = {0.0};
    cfg.drive_freqs = {cfg.sys.target.freq_01 - 40.0, cfg.sys.target.freq_01 - 60.0};
    EXPECT_THROW(calibrate_cz(cfg), CalibrationFailure);
}

TEST(CalibrateCz, LocalZCorrectionReachesCz) {
    auto cfg = pair2_config();
    cfg.amplitudes = {26.0, 28.0, 30.0};
    cfg.drive_freqs = {cfg.sys.target.freq_01 - 40.0};
    const auto cal = calibrate_cz(cfg);
    EXPECT_NEAR(std::abs(wrap_phase(cal.conditional_phase)), pi, 1e-4);
    EXPECT_GT(cal.fidelity, 0.999);
    EXPECT_GE(cal.fidelity, cal.fidelity_uncorrected);

    const auto pulse = pulse_at(cfg, cal.amplitude, cal.drive_freq);
    const auto r0 = conditional_bloch(cfg.sys, pulse, 0);
    const auto r1 = conditional_bloch(cfg.sys, pulse, 1);
    EXPECT_GT(r0.norm(), 0.98);
    EXPECT_GT(r1.norm(), 0.98);
    EXPECT_LT((r0.vec() + r1.vec()).norm(), 0.1);
    EXPECT_LT(std::abs(r0.z), 0.05);
    EXPECT_NEAR(r_metric(r0, r1), cal.r_refined, 1e-9);
}
