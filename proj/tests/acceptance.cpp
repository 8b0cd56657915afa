// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "starkzz/benchmarking.hpp"
#include "starkzz/calibration.hpp"
#include "starkzz/crosstalk.hpp"
#include "starkzz/dynamics.hpp"
#include "starkzz/errors.hpp"
#include "starkzz/parallel.hpp"
#include "starkzz/perturbation.hpp"
#include "starkzz/spectrum.hpp"
#include "starkzz/stats.hpp"

using namespace starkzz;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DriveConfig drive_at(const SystemParams& sys, double target_detuning, double eps_c, double eps_t,
                     double phi_d) {
    DriveConfig d;
    d.drive_freq = sys.target.freq_01 - target_detuning;
    d.eps_c = eps_c;
    d.eps_t = eps_t * std::polar(1.0, phi_d);
    return d;
}

double relative_error(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

double r_squared(const std::vector<double>& x, const std::vector<double>& y) { return linear_fit(x, y).r_squared; }

// ---------------------------------------------------------------- 1, 2
void static_zz() {
    constexpr double zeta_tol = 0.10;
    constexpr double pt_tol = 0.02;
    constexpr double max_runtime_s = 1.0;

    const auto t0 = std::chrono::steady_clock::now();
    const auto p2 = reference_pair_2(7);
    const double z2 = zz_rate(p2, DriveConfig{p2.target.freq_01 - 40.0, 0.0, 0.0});
    const double pt2 = zeta2(p2);
    const double dt = seconds_since(t0);
    report(1, relative_error(std::abs(z2), 0.170) <= zeta_tol && relative_error(std::abs(pt2), 0.1707) <= pt_tol &&
                  dt < max_runtime_s,
           "static ZZ pair 2", fmt("|zeta|=%.4f MHz (0.170 +-10%%), |zeta2|=%.4f MHz (0.1707 +-2%%), %.3f s", std::abs(z2),
                                   std::abs(pt2), dt));

    const auto p1 = reference_pair_1(7);
    const double z1 = zz_rate(p1, DriveConfig{p1.target.freq_01 - 40.0, 0.0, 0.0});
    report(2, relative_error(std::abs(z1), 0.307) <= zeta_tol, "static ZZ pair 1",
           fmt("|zeta|=%.4f MHz (0.307 +-10%%)", std::abs(z1)));
}

// ---------------------------------------------------------------- 3
void perturbation_vs_exact() {
    constexpr double tol = 0.15;
    constexpr int phases = 16;
    const std::vector<double> amps{2.0, 4.0, 6.0, 8.0, 10.0};

    const auto sys = reference_pair_1(7);
    double worst = 0.0;
    double worst_eps = 0.0, worst_phi = 0.0;
    int points = 0, skipped = 0;
    std::vector<double> worst_per_amp(amps.size(), 0.0);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        for (int k = 0; k < phases; ++k) {
            const double phi = 2.0 * pi * k / phases;
            const auto d = drive_at(sys, 40.0, amps[i], amps[i], phi);
            double exact = 0.0, approx = 0.0;
            try {
                const auto dressed = labeled_spectrum(sys, d);
                if (dressed.flagged()) {
                    ++skipped;
                    continue;
                }
                exact = dressed.zz();
                approx = zeta_pt_total(sys, d);
            } catch (const Error&) {
                ++skipped;
                continue;
            }
            ++points;
            const double err = relative_error(approx, exact);
            worst_per_amp[i] = std::max(worst_per_amp[i], err);
            if (err > worst) {
                worst = err;
                worst_eps = amps[i];
                worst_phi = phi;
            }
        }
    }
    std::string per_amp;
    for (std::size_t i = 0; i < amps.size(); ++i) per_amp += fmt(" %g:%.1f%%", amps[i], 100.0 * worst_per_amp[i]);
    report(3, worst <= tol && points > 0, "perturbation vs exact",
           fmt("max rel err %.1f%% at eps=%g phi=%.3f (limit 15%%), %d points, %d flagged; worst by eps:%s",
               100.0 * worst, worst_eps, worst_phi, points, skipped, per_amp.c_str()));
}

// ---------------------------------------------------------------- 4
void phase_tunability() {
    constexpr double rms_fraction = 0.05;
    constexpr int phases = 64;
    const std::vector<double> amps{5.0, 10.0, 15.0, 20.0};

    const auto sys = reference_pair_1(7);
    bool pass = true;
    std::string detail;
    for (double a : amps) {
        std::vector<double> phi, zeta;
        for (int k = 0; k < phases; ++k) {
            const double p = 2.0 * pi * k / phases;
            const auto [ec, et] = apply_crosstalk(CrosstalkMatrix::identity(), a, a, p, 1.0);
            phi.push_back(p);
            zeta.push_back(zz_rate(sys, DriveConfig{sys.target.freq_01 - 40.0, ec, et}));
        }
        const auto fit = sinusoid_fit(phi, zeta);
        const bool shape_ok = fit.rms_residual < rms_fraction * fit.amplitude;
        const bool crosses = std::any_of(zeta.begin(), zeta.end(), [&](double z) { return z * zeta[0] < 0.0; });
        const bool sign_ok = std::abs(fit.amplitude) <= std::abs(fit.offset) || crosses;
        pass = pass && shape_ok && sign_ok;
        detail += fmt("eps=%g c0=%.3f c1=%.3f rms/c1=%.2f%% %s; ", a, fit.offset, fit.amplitude,
                      100.0 * fit.rms_residual / fit.amplitude,
                      std::abs(fit.amplitude) > std::abs(fit.offset) ? (crosses ? "crosses zero" : "NO zero crossing")
                                                                     : "|c1|<=|c0|");
    }
    report(4, pass, "phase tunability and cancellation", detail);
}

// ---------------------------------------------------------------- 5
void amplitude_linearity() {
    constexpr double min_r2 = 0.99;
    constexpr int points = 31;
    const std::vector<double> eps_c{5.0, 10.0, 15.0};

    const auto sys = reference_pair_1(7);
    bool pass = true;
    std::string detail;
    for (double ec : eps_c) {
        std::vector<double> x, y, xs, ys;
        int flagged = 0;
        for (int k = 0; k < points; ++k) {
            const double et = 15.0 * k / (points - 1);
            const auto dressed = labeled_spectrum(sys, drive_at(sys, 40.0, ec, et, pi));
            if (dressed.flagged()) {
                ++flagged;
                continue;
            }
            x.push_back(et);
            y.push_back(dressed.zz());
            if (et <= 12.5) {
                xs.push_back(et);
                ys.push_back(dressed.zz());
            }
        }
        const double r2 = r_squared(x, y);
        pass = pass && r2 > min_r2;
        detail += fmt("eps_c=%g R2=%.4f (%d flagged, R2 on [0,12.5]=%.4f); ", ec, r2, flagged, r_squared(xs, ys));
    }
    report(5, pass, "amplitude linearity", detail);
}

// ---------------------------------------------------------------- 6
void enhancement() {
    constexpr double min_zeta = 3.0;
    constexpr double min_ratio = 10.0;
    constexpr int amp_points = 31;
    constexpr int phases = 16;

    const auto sys = reference_pair_1(7);
    const double z0 = std::abs(zz_rate(sys, DriveConfig{sys.target.freq_01 - 40.0, 0.0, 0.0}));
    double best = 0.0, best_a = 0.0, best_phi = 0.0;
    for (int i = 0; i < amp_points; ++i) {
        const double a = 30.0 * i / (amp_points - 1);
        for (int k = 0; k < phases; ++k) {
            const double phi = 2.0 * pi * k / phases;
            try {
                const auto dressed = labeled_spectrum(sys, drive_at(sys, 40.0, a, a, phi));
                if (dressed.flagged()) continue;
                if (std::abs(dressed.zz()) > best) {
                    best = std::abs(dressed.zz());
                    best_a = a;
                    best_phi = phi;
                }
            } catch (const LabelingFailure&) {
            }
        }
    }
    report(6, best >= min_zeta && best >= min_ratio * z0, "order-of-magnitude enhancement",
           fmt("max |zeta|=%.3f MHz at eps=%g phi=%.3f, zeta0=%.4f MHz, ratio %.1f", best, best_a, best_phi, z0,
               best / z0));
}

// ---------------------------------------------------------------- 7 - 11
void benchmarking() {
    constexpr double fidelity_tol = 1e-4;
    const auto irb = interleaved_fidelity(0.9744, 0.9672, 4);
    report(7, std::abs(irb.fidelity - 0.9944) <= fidelity_tol, "IRB arithmetic",
           fmt("F=%.6f (0.9944 +-0.0001)", irb.fidelity));

    const auto cb_int = cb_analyze({{"CZ", 0.98937}}, 4);
    const auto cb_ref = cb_analyze({{"I", 0.99702}}, 4);
    const auto cb = interleaved_fidelity(cb_ref.mean_decay, cb_int.mean_decay, 4);
    report(8, std::abs(cb.fidelity - 0.9943) <= fidelity_tol, "CB arithmetic",
           fmt("F=%.6f (0.9943 +-0.0001)", cb.fidelity));

    const auto budget = ErrorBudget::from_infidelities(1.78e-2, 1.41e-2);
    constexpr double additivity_tol = 1e-15;
    report(9, std::abs(budget.e_u - 0.37e-2) <= additivity_tol && !budget.floored, "XRB budget",
           fmt("e_u=%.17g (0.0037)", budget.e_u));

    constexpr double coherence_tol = 0.25e-2;
    const auto coh = coherence_limit(65.0, 86.0, 58.0, 77.0, 0.389, 4);
    report(10, std::abs(coh.infidelity - 0.76e-2) <= coherence_tol, "coherence limit",
           fmt("e_decoh=%.4e (0.76e-2 +-0.25e-2)", coh.infidelity));

    constexpr double gamma_up = 1.4e-4;
    constexpr double gamma_down = 5e-3;
    constexpr double rel_tol = 0.05;
    constexpr int trials = 100;
    constexpr int shots = 1000;
    constexpr int samples_per_length = 300;
    std::vector<int> lengths;
    for (int k = 0; k <= 10; ++k) lengths.push_back(1 << k);
    const double b = gamma_up / (gamma_up + gamma_down);
    const LeakageModel model{b, b, gamma_up + gamma_down};
    int inside = 0, errors = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        try {
            const auto data = synth_decay(model, lengths, shots, 5000 + static_cast<std::uint64_t>(t),
                                          samples_per_length);
            const auto fit = lrb_fit(data);
            const double err = relative_error(fit.gamma_up, gamma_up);
            worst = std::max(worst, err);
            if (err <= rel_tol) ++inside;
        } catch (const Error&) {
            ++errors;
        }
    }
    report(11, inside == trials, "LRB round trip",
           fmt("%d/%d trials within 5%%, worst %.2f%%, %d fit errors (1000 shots, %d sequences per length)", inside,
               trials, 100.0 * worst, errors, samples_per_length));
}

// ---------------------------------------------------------------- 12
std::vector<ZZSweepPoint> crosstalk_data(const SystemParams& sys, double wd, const CrosstalkModel& m, double noise,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise > 0.0 ? noise : 1.0);
    const std::vector<std::pair<double, double>> amps{{0.2, 0.2}, {0.4, 0.4}, {0.4, 0.15}, {0.15, 0.4}};
    std::vector<ZZSweepPoint> out;
    for (const auto& [ac, at] : amps) {
        for (int k = 0; k < 24; ++k) {
            ZZSweepPoint p{ac, at, 2.0 * pi * k / 24.0, 0.0, noise > 0.0 ? noise : 0.005};
            p.zeta_measured = model_zeta(sys, wd, m, p) + (noise > 0.0 ? n(rng) : 0.0);
            out.push_back(p);
        }
    }
    return out;
}

void crosstalk_round_trip() {
    constexpr double exact_ss = 1e-6;
    constexpr double magnitude_tol = 0.02;
    constexpr double phase_tol = 0.05;
    constexpr double noise_mhz = 0.005;

    const auto sys = reference_pair_1(7);
    const double wd = sys.target.freq_01 - 40.0;
    const CrosstalkModel truth{{0.08, 0.4, 0.05, -1.1, 0.3}, 25.0};
    const CrosstalkModel start{CrosstalkMatrix::identity(), 20.0};

    const auto clean = fit_crosstalk(crosstalk_data(sys, wd, truth, 0.0, 1), sys, wd, start);
    const auto noisy = fit_crosstalk(crosstalk_data(sys, wd, truth, noise_mhz, 12), sys, wd, start);
    const auto& x = noisy.model.xt;
    const double mag_err = std::max({relative_error(x.c_ct, truth.xt.c_ct), relative_error(x.c_tc, truth.xt.c_tc),
                                     relative_error(noisy.model.scale, truth.scale)});
    const double phase_err = std::max({std::abs(wrap_phase(x.phi_ct - truth.xt.phi_ct)),
                                       std::abs(wrap_phase(x.phi_tc - truth.xt.phi_tc)),
                                       std::abs(wrap_phase(x.theta_c - truth.xt.theta_c))});
    report(12, clean.residual_ss < exact_ss && mag_err <= magnitude_tol && phase_err <= phase_tol,
           "crosstalk fit round trip",
           fmt("noiseless residual %.2e MHz^2; 5 kHz noise: max magnitude err %.2f%%, max phase err %.4f rad "
               "(fit 1-sigma: c_ct %.1f%%, c_tc %.1f%%, phi_ct %.3f rad, phi_tc %.3f rad)",
               clean.residual_ss, 100.0 * mag_err, phase_err, 100.0 * noisy.uncertainty[0] / x.c_ct,
               100.0 * noisy.uncertainty[2] / x.c_tc, noisy.uncertainty[1], noisy.uncertainty[3]));
}

// ---------------------------------------------------------------- 13
void unitarity() {
    constexpr double tol = 1e-9;
    const auto sys = reference_pair_2(7);
    ShapedPulse pulse;
    pulse.shape = PulseShape{201.0, 0.4};
    pulse.peak = drive_at(sys, 50.0, 28.0, 28.0, pi);
    const auto u = pulse_propagator(sys, pulse, 0.05);
    const double defect =
        (u.adjoint() * u - DenseMatrix<cplx>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    report(13, defect < tol, "propagator unitarity", fmt("max |U^dag U - I| = %.2e (limit 1e-9)", defect));
}

// ---------------------------------------------------------------- 14
void ramsey_consistency() {
    constexpr double tol = 0.02;
    const auto sys = reference_pair_1(7);
    const std::vector<DriveConfig> drives{drive_at(sys, 40.0, 5.0, 5.0, 0.0), drive_at(sys, 40.0, 10.0, 10.0, pi),
                                          drive_at(sys, 40.0, 8.0, 4.0, 0.5 * pi)};
    bool pass = true;
    std::string detail;
    for (const auto& d : drives) {
        const double exact = zz_rate(sys, d);
        const auto res = ramsey_zz(sys, d, ramsey_time_grid(sys, d));
        const double err = relative_error(res.zeta, exact);
        pass = pass && err <= tol;
        detail += fmt("ramsey %.4f vs eig %.4f MHz (%.2f%%); ", res.zeta, exact, 100.0 * err);
    }
    report(14, pass, "Ramsey vs eigenvalue", detail);
}

// ---------------------------------------------------------------- 15
void calibration() {
    constexpr double min_band_mhz = 30.0;
    constexpr double band_threshold = 1.9;
    constexpr double min_fidelity = 0.999;

    RSweepConfig cfg;
    cfg.sys = reference_pair_2(7);
    cfg.crosstalk = {CrosstalkMatrix::identity(), 1.0};
    cfg.shape = PulseShape{201.0, 0.4};
    cfg.phi_d = pi;
    for (int i = 0; i <= 15; ++i) cfg.amplitudes.push_back(10.0 + 2.0 * i);
    for (int i = 0; i < 10; ++i) cfg.drive_freqs.push_back(cfg.sys.target.freq_01 - 100.0 + 10.0 * i);
    cfg.jobs = default_jobs();

    CzCalibrationOptions opts;
    opts.band_threshold = band_threshold;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto cal = calibrate_cz(cfg, opts);
        const double dt = seconds_since(t0);

        // Same refinement restricted to the -40 MHz row, for comparison.
        RSweepConfig row = cfg;
        row.drive_freqs = {cfg.sys.target.freq_01 - 40.0};
        const auto alt = calibrate_cz(row, opts);

        report(15, cal.band.width() >= min_band_mhz && cal.fidelity > min_fidelity, "CZ calibration end to end",
               fmt("R>=1.9 band %.0f..%.0f MHz (width %.0f, need 30); selected wd-wt=%.0f MHz A=%.4f R=%.5f "
                   "cphase=%.4f F=%.6f (need >0.999) leakage=%.2e; at wd-wt=-40: A=%.4f F=%.6f leakage=%.2e; %.0f s",
                   cal.band.lo, cal.band.hi, cal.band.width(), cal.drive_freq - cfg.sys.target.freq_01,
                   cal.amplitude, cal.r_refined, cal.conditional_phase, cal.fidelity, cal.leakage, alt.amplitude,
                   alt.fidelity, alt.leakage, dt));
    } catch (const Error& e) {
        report(15, false, "CZ calibration end to end", e.what());
    }
}

}  // namespace

int main() {
    static_zz();
    perturbation_vs_exact();
    phase_tunability();
    amplitude_linearity();
    enhancement();
    benchmarking();
    crosstalk_round_trip();
    unitarity();
    ramsey_consistency();
    calibration();
    std::printf("%d of 15 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
