#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "starkzz/benchmarking.hpp"
#include "starkzz/errors.hpp"

using namespace starkzz;

namespace {

const std::vector<int> short_lengths{2, 16, 32};

std::vector<int> geometric_lengths() {
    std::vector<int> m;
    for (int k = 0; k <= 10; ++k) m.push_back(1 << k);
    return m;
}

LeakageModel leakage_model(double up, double down) {
    const double gamma = up + down;
    const double b = up / gamma;
    return {b, b, gamma};  // P2(0) = 0
}

}  // namespace

TEST(FitDecay, NoiselessExact) {
    const auto data = synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, std::nullopt, 0);
    const auto fit = fit_decay(data);
    EXPECT_NEAR(fit.a, 0.9, 1e-9);
    EXPECT_NEAR(fit.p, 0.97, 1e-9);
    EXPECT_FALSE(fit.clamped);
}

TEST(FitDecay, ConstantData) {
    DecayDataset d;
    d.lengths = {1, 5, 10, 20};
    d.values = {{0.8}, {0.8}, {0.8}, {0.8}};
    const auto fit = fit_decay(d);
    EXPECT_NEAR(fit.p, 1.0, 1e-9);
    EXPECT_NEAR(fit.a, 0.8, 1e-9);
}

TEST(FitDecay, GrowingDataIsClamped) {
    DecayDataset d;
    d.lengths = {1, 10, 20};
    d.values = {{0.70}, {0.75}, {0.80}};
    const auto fit = fit_decay(d);
    EXPECT_TRUE(fit.clamped);
    EXPECT_EQ(fit.p, 1.0);
    EXPECT_NEAR(fit.a, 0.75, 1e-12);
}

TEST(FitDecay, Preconditions) {
    DecayDataset d;
    d.lengths = {1, 2};
    d.values = {{0.9}, {0.8}};
    EXPECT_THROW(fit_decay(d), InsufficientData);
    d.lengths = {1, 2, 3};
    d.values = {{0.9}, {0.8}, {0.0}};
    EXPECT_THROW(fit_decay(d), InvalidParameter);
    d.values = {{0.9}, {0.8}, {1.2}};
    EXPECT_THROW(fit_decay(d), InvalidParameter);
    d.values = {{0.9}, {0.8}, {0.7}};
    d.lengths = {1, 3, 2};
    EXPECT_THROW(fit_decay(d), InvalidParameter);
}

TEST(FitDecay, ShotNoiseCoverage) {
    int inside = 0;
    const int trials = 500;
    for (int s = 0; s < trials; ++s) {
        const auto data = synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, 1000,
                                      static_cast<std::uint64_t>(1000 + s));
        const auto fit = fit_decay(data);
        if (std::abs(fit.p - 0.97) <= 3.0 * fit.sigma_p) ++inside;
    }
    EXPECT_GE(inside, static_cast<int>(0.99 * trials));
}

TEST(FitDecay, SeededRoundTrip) {
    const auto data = synth_decay(ExponentialModel{0.9, 0.9744}, short_lengths, 1000, 7);
    const auto fit = fit_decay(data);
    EXPECT_LE(std::abs(fit.p - 0.9744), 3.0 * fit.sigma_p);
    EXPECT_LE(std::abs(fit.a - 0.9), 3.0 * fit.sigma_a);
    EXPECT_GT(fit.sigma_p, 0.0);
}

TEST(FitDecay, Deterministic) {
    const auto data = synth_decay(ExponentialModel{0.85, 0.98}, {1, 2, 4, 8, 16, 32, 64, 128}, 500, 3, 4);
    const auto a = fit_decay(data);
    const auto b = fit_decay(data);
    EXPECT_EQ(a.p, b.p);
    EXPECT_EQ(a.a, b.a);
    EXPECT_EQ(a.sigma_p, b.sigma_p);
}

TEST(Interleaved, PaperIrbValues) {
    const auto f = interleaved_fidelity(0.9744, 0.9672, 4);
    EXPECT_NEAR(f.fidelity, 0.99446, 5e-6);
    EXPECT_FALSE(f.warning);
}

TEST(Interleaved, PaperCbValues) {
    EXPECT_NEAR(interleaved_fidelity(0.99702, 0.98937, 4).fidelity, 0.99425, 5e-6);
}

TEST(Interleaved, EqualDecaysGiveUnity) {
    for (double p : {0.5, 0.9, 0.999, 1.0}) {
        for (int d : {2, 4, 8}) EXPECT_EQ(interleaved_fidelity(p, p, d).fidelity, 1.0);
    }
}

TEST(Interleaved, WarningsAndErrors) {
    EXPECT_TRUE(interleaved_fidelity(0.9, 0.95, 4).warning);
    EXPECT_TRUE(interleaved_fidelity(1.1, 0.95, 4).warning);
    EXPECT_THROW(interleaved_fidelity(0.0, 0.9, 4), InvalidParameter);
}

TEST(Cb, AllPerfect) {
    const auto cb = cb_analyze({{"IX", 1.0}, {"ZZ", 1.0}}, 4);
    for (const auto& [k, e] : cb.error_rates) EXPECT_EQ(e, 0.0);
    EXPECT_EQ(cb.process_infidelity, 0.0);
}

TEST(Cb, SingleLabel) {
    const auto cb = cb_analyze({{"avg", 0.98937}}, 4);
    EXPECT_NEAR(cb.error_rates.at("avg"), 0.009966, 5e-7);
}

TEST(Cb, Average) {
    const auto cb = cb_analyze({{"XI", 0.99}, {"IZ", 0.97}}, 4);
    EXPECT_NEAR(cb.mean_decay, 0.98, 1e-15);
    EXPECT_NEAR(cb.process_infidelity, 0.01875, 1e-15);
}

TEST(Cb, MonotoneInDecay) {
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 0.5; p <= 1.0; p += 0.05) {
        const double e = cb_analyze({{"X", p}}, 4).error_rates.at("X");
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(Cb, Preconditions) {
    EXPECT_THROW(cb_analyze({}, 4), InvalidParameter);
    EXPECT_THROW(cb_analyze({{"X", 1.2}}, 4), InvalidParameter);
}

TEST(Xrb, DepolarizingLimit) {
    const auto b = xrb_decompose(0.97, 0.97 * 0.97, 4);
    EXPECT_NEAR(b.e_u, 0.0, 1e-15);
    EXPECT_FALSE(b.floored);
}

TEST(Xrb, PaperBudgetAdditivity) {
    const auto b = ErrorBudget::from_infidelities(1.78e-2, 1.41e-2);
    EXPECT_NEAR(b.e_u, 0.37e-2, 1e-12);
    EXPECT_NEAR(b.e_f, b.e_s + b.e_u, 1e-12);
}

TEST(Xrb, UnitaryLimit) {
    const auto b = xrb_decompose(0.98, 1.0, 4);
    EXPECT_EQ(b.e_s, 0.0);
    EXPECT_DOUBLE_EQ(b.e_u, b.e_f);
    EXPECT_NEAR(b.e_f, 0.02 * 0.9375, 1e-15);
}

TEST(Xrb, FlooredAndInvalid) {
    const auto b = xrb_decompose(0.99, 0.9, 4);  // u < p²
    EXPECT_TRUE(b.floored);
    EXPECT_EQ(b.e_u, 0.0);
    EXPECT_NEAR(b.e_f, b.e_s + b.e_u, 1e-15);
    EXPECT_GE(b.e_s, 0.0);
    EXPECT_THROW(xrb_decompose(0.99, 1.01, 4), InvalidParameter);
    EXPECT_THROW(xrb_decompose(0.99, 0.0, 4), InvalidParameter);
}

TEST(Lrb, NoiselessRoundTrip) {
    const auto data = synth_decay(leakage_model(2e-4, 1e-2), geometric_lengths(), std::nullopt, 0);
    const auto fit = lrb_fit(data);
    EXPECT_NEAR(fit.gamma_up, 2e-4, 1e-8);
    EXPECT_NEAR(fit.gamma_down, 1e-2, 1e-8);
}

TEST(Lrb, FlatDataIsModelMismatch) {
    DecayDataset d;
    d.kind = DecayKind::leakage_pop;
    d.lengths = {1, 10, 100, 1000};
    d.values = {{0.02}, {0.02}, {0.02}, {0.02}};
    EXPECT_THROW(lrb_fit(d), ModelMismatch);
}

TEST(Lrb, NoisyRecovery) {
    const auto data = synth_decay(leakage_model(1.4e-4, 5e-3), geometric_lengths(), 1000, 21, 300);
    const auto fit = lrb_fit(data);
    EXPECT_NEAR(fit.gamma_up, 1.4e-4, 0.05 * 1.4e-4);
    EXPECT_GT(fit.sigma_up, 0.0);
}

TEST(LeakagePerGate, Examples) {
    EXPECT_EQ(leakage_per_gate(3e-4, 3e-4).rate, 0.0);
    EXPECT_NEAR(leakage_per_gate(3.4e-4, 2.0e-4).rate, 1.4e-4, 1e-18);
    EXPECT_NEAR(leakage_per_gate(1.7e-4, 1.0e-4).rate, 7e-5, 1e-18);
    const auto neg = leakage_per_gate(1e-4, 2e-4);
    EXPECT_EQ(neg.rate, 0.0);
    EXPECT_TRUE(neg.floored);
}

TEST(CoherenceLimit, Examples) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(coherence_limit(inf, inf, inf, inf, 0.389, 4).infidelity, 0.0);
    EXPECT_EQ(coherence_limit(65, 86, 58, 77, 0.0, 4).infidelity, 0.0);
    const auto c = coherence_limit(65, 86, 58, 77, 0.389, 4);
    EXPECT_NEAR(c.infidelity, 0.76e-2, 0.25e-2);
    EXPECT_FALSE(c.warning);
    EXPECT_TRUE(coherence_limit(10, 30, 58, 77, 0.389, 4).warning);
    EXPECT_THROW(coherence_limit(0, 86, 58, 77, 0.389, 4), InvalidParameter);
}

TEST(Synth, DeterministicAndExact) {
    const auto a = synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, 1000, 99, 3);
    const auto b = synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, 1000, 99, 3);
    EXPECT_EQ(a.values, b.values);
    const auto c = synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, 1000, 100, 3);
    EXPECT_NE(a.values, c.values);
    const auto exact = synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, std::nullopt, 1);
    for (std::size_t i = 0; i < short_lengths.size(); ++i) {
        EXPECT_DOUBLE_EQ(exact.values[i][0], 0.9 * std::pow(0.97, short_lengths[i]));
    }
    EXPECT_THROW(synth_decay(ExponentialModel{0.9, 0.97}, short_lengths, 0, 1), InvalidParameter);
}
