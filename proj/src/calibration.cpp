#include "starkzz/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "starkzz/parallel.hpp"
#include "starkzz/stats.hpp"

namespace starkzz {

using std::numbers::pi;

namespace {

std::array<Eigen::Index, 4> computational_rows(const SystemParams& sys) {
    return {sys.index(0, 0), sys.index(0, 1), sys.index(1, 0), sys.index(1, 1)};
}

// Pulse propagator restricted to the computational states, bare frame, as a
// (dim × 4) matrix of evolved columns.
DenseMatrix<cplx> evolved_computational(const SystemParams& sys, const ShapedPulse& pulse,
                                        double step) {
    const auto rows = computational_rows(sys);
    DenseMatrix<cplx> init = DenseMatrix<cplx>::Zero(sys.dim(), 4);
    for (int j = 0; j < 4; ++j) {
        init(rows[static_cast<std::size_t>(j)], j) = 1.0;
    }
    DenseMatrix<cplx> out =
        propagate_columns(sys, pulse, init, 0.0, pulse.shape.total_duration, step);
    const auto frame = bare_frame_phases(sys, pulse.peak.drive_freq, pulse.shape.total_duration);
    return frame.asDiagonal() * out;
}

Matrix4c block_of_columns(const SystemParams& sys, const DenseMatrix<cplx>& cols) {
    const auto rows = computational_rows(sys);
    Matrix4c out;
    for (int i = 0; i < 4; ++i) {
        out.row(i) = cols.row(rows[static_cast<std::size_t>(i)]);
    }
    return out;
}

}  // namespace

Matrix4c computational_block(const SystemParams& sys, const DenseMatrix<cplx>& u) {
    const auto rows = computational_rows(sys);
    Matrix4c out;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out(i, j) = u(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

double conditional_phase(const Matrix4c& u) {
    return std::arg(u(3, 3) * u(0, 0) / (u(1, 1) * u(2, 2)));
}

double average_gate_fidelity(const Matrix4c& actual, const Matrix4c& ideal) {
    const Matrix4c m = ideal.adjoint() * actual;
    const double d = 4.0;
    return ((m * m.adjoint()).trace().real() + std::norm(m.trace())) / (d * (d + 1.0));
}

Matrix4c ideal_cz() {
    Matrix4c cz = Matrix4c::Identity();
    cz(3, 3) = -1.0;
    return cz;
}

Matrix4c virtual_z(Qubit qubit, double phi) {
    const cplx e = std::polar(1.0, phi);
    Matrix4c out = Matrix4c::Identity();
    if (qubit == Qubit::control) {
        out(2, 2) = e;
        out(3, 3) = e;
    } else {
        out(1, 1) = e;
        out(3, 3) = e;
    }
    return out;
}

std::size_t RMap::flagged_count() const {
    return static_cast<std::size_t>(r.array().isNaN().count());
}

double RMap::max_over_amplitude(Eigen::Index freq_row) const {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
        if (!std::isnan(r(freq_row, j))) {
            best = std::max(best, r(freq_row, j));
        }
    }
    return best;
}

ShapedPulse pulse_at(const RSweepConfig& cfg, double amplitude, double drive_freq) {
    const auto [eps_c, eps_t] = apply_crosstalk(cfg.crosstalk, amplitude, amplitude, cfg.phi_d);
    return {cfg.shape, DriveConfig{drive_freq, eps_c, eps_t}};
}

double r_at(const RSweepConfig& cfg, double amplitude, double drive_freq) {
    const auto pulse = pulse_at(cfg, amplitude, drive_freq);
    DenseMatrix<cplx> init(cfg.sys.dim(), 2);
    init.col(0) = ramsey_input(cfg.sys, 0);
    init.col(1) = ramsey_input(cfg.sys, 1);
    DenseMatrix<cplx> out =
        propagate_columns(cfg.sys, pulse, init, 0.0, pulse.shape.total_duration, cfg.step);
    const auto frame =
        bare_frame_phases(cfg.sys, pulse.peak.drive_freq, pulse.shape.total_duration);
    out = frame.asDiagonal() * out;
    return r_metric(target_bloch(cfg.sys, out.col(0)), target_bloch(cfg.sys, out.col(1)));
}

RMap sweep_r(const RSweepConfig& cfg) {
    cfg.sys.validate();
    cfg.shape.validate();
    if (cfg.amplitudes.empty() || cfg.drive_freqs.empty()) {
        throw InvalidParameter("sweep_r: amplitude and frequency grids must be non-empty");
    }
    RMap map;
    map.amplitudes = cfg.amplitudes;
    map.drive_freqs = cfg.drive_freqs;
    const auto nf = static_cast<Eigen::Index>(cfg.drive_freqs.size());
    const auto na = static_cast<Eigen::Index>(cfg.amplitudes.size());
    map.r = Eigen::MatrixXd::Constant(nf, na, std::numeric_limits<double>::quiet_NaN());
    map.notes.assign(static_cast<std::size_t>(nf * na), {});
    parallel_for(static_cast<std::size_t>(nf * na), cfg.jobs, [&](std::size_t cell) {
        const auto i = static_cast<Eigen::Index>(cell) / na;
        const auto j = static_cast<Eigen::Index>(cell) % na;
        try {
            map.r(i, j) = r_at(cfg, cfg.amplitudes[static_cast<std::size_t>(j)],
                               cfg.drive_freqs[static_cast<std::size_t>(i)]);
        } catch (const Error& e) {
            map.notes[cell] = e.what();
        }
    });
    return map;
}

void write_rmap_csv(const RMap& map, std::ostream& os) {
    os << "a,freq_mhz,r_value\n";
    char buf[96];
    for (std::size_t i = 0; i < map.drive_freqs.size(); ++i) {
        for (std::size_t j = 0; j < map.amplitudes.size(); ++j) {
            const double r = map.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,", map.amplitudes[j], map.drive_freqs[i]);
            os << buf;
            if (std::isnan(r)) {
                os << "nan\n";
            } else {
                std::snprintf(buf, sizeof buf, "%.12g\n", r);
                os << buf;
            }
        }
    }
}

FrequencyBand r_band(const RMap& map, double threshold) {
    FrequencyBand best{};
    bool found = false;
    std::size_t start = 0;
    bool in_run = false;
    const std::size_t n = map.drive_freqs.size();
    for (std::size_t i = 0; i <= n; ++i) {
        const bool ok =
            i < n && map.max_over_amplitude(static_cast<Eigen::Index>(i)) >= threshold;
        if (ok && !in_run) {
            start = i;
            in_run = true;
        } else if (!ok && in_run) {
            const FrequencyBand run{map.drive_freqs[start], map.drive_freqs[i - 1]};
            if (!found || run.width() > best.width()) {
                best = run;
                found = true;
            }
            in_run = false;
        }
    }
    return best;
}

double calibrate_local_z(const LocalZCurve& partner0, const LocalZCurve& partner1) {
    for (const auto* c : {&partner0, &partner1}) {
        if (c->phases.size() < 16 || c->phases.size() != c->values.size()) {
            throw InsufficientData("calibrate_local_z: each curve needs at least 16 points");
        }
        const auto [lo, hi] = std::minmax_element(c->phases.begin(), c->phases.end());
        if (*hi - *lo < 2.0 * pi * (1.0 - 1.0 / static_cast<double>(c->phases.size())) - 1e-9) {
            throw InsufficientData("calibrate_local_z: each curve must span a full period");
        }
    }
    const auto fit0 = sinusoid_fit(partner0.phases, partner0.values);
    const auto fit1 = sinusoid_fit(partner1.phases, partner1.values);
    if (fit0.amplitude < 0.1 || fit1.amplitude < 0.1) {
        throw LowContrast("calibrate_local_z: fringe contrast below 0.1");
    }
    // partner |0⟩: maximum at −φ₀; partner |1⟩: minimum at π − φ₀
    const double a = -fit0.phase;
    const double b = pi - fit1.phase;
    return std::arg(std::polar(1.0, a) + std::polar(1.0, b));
}

LocalZCurve simulate_local_z_curve(const Matrix4c& u, Qubit qubit, int partner_level,
                                   const std::vector<double>& phases) {
    if (partner_level != 0 && partner_level != 1) {
        throw InvalidParameter("simulate_local_z_curve: partner level must be 0 or 1");
    }
    // index = 2·control + target
    auto idx = [qubit](int self, int partner) {
        return qubit == Qubit::control ? 2 * self + partner : 2 * partner + self;
    };
    Eigen::Matrix<cplx, 4, 1> in = Eigen::Matrix<cplx, 4, 1>::Zero();
    in(idx(0, partner_level)) = 1.0 / std::sqrt(2.0);
    in(idx(1, partner_level)) = 1.0 / std::sqrt(2.0);
    const Eigen::Matrix<cplx, 4, 1> out = u * in;

    LocalZCurve curve;
    curve.phases = phases;
    for (double phi : phases) {
        const Eigen::Matrix<cplx, 4, 1> psi = virtual_z(qubit, phi) * out;
        double x = 0.0;
        for (int p = 0; p < 2; ++p) {
            x += 2.0 * (std::conj(psi(idx(0, p))) * psi(idx(1, p))).real();
        }
        curve.values.push_back(x);
    }
    return curve;
}

namespace {

// Golden-section minimization of f on [a, b].
template <typename F>
double golden_section(F&& f, double a, double b, double rel_tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (std::abs(b - a) > rel_tol * std::max(std::abs(a) + std::abs(b), 1e-12)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

CzCalibration calibrate_cz(const RSweepConfig& cfg, const CzCalibrationOptions& opts) {
    CzCalibration out;
    out.map = sweep_r(cfg);
    const auto& r = out.map.r;

    Eigen::Index bi = -1;
    Eigen::Index bj = -1;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            if (!std::isnan(r(i, j)) && (bi < 0 || r(i, j) > r(bi, bj))) {
                bi = i;
                bj = j;
            }
        }
    }
    if (bi < 0 || r(bi, bj) <= opts.min_r) {
        throw CalibrationFailure(
            "calibrate_cz: no grid point reaches R > " + std::to_string(opts.min_r) +
            "; widen the amplitude or frequency grid");
    }
    out.r_grid_max = r(bi, bj);
    out.band = r_band(out.map, opts.band_threshold);
    out.drive_freq = cfg.drive_freqs[static_cast<std::size_t>(bi)];

    const auto& amps = cfg.amplitudes;
    const auto j = static_cast<std::size_t>(bj);
    const double lo = amps[j > 0 ? j - 1 : j];
    const double hi = amps[j + 1 < amps.size() ? j + 1 : j];
    auto block_at = [&](double a) {
        return block_of_columns(cfg.sys,
                                evolved_computational(cfg.sys, pulse_at(cfg, a, out.drive_freq),
                                                      cfg.step));
    };
    auto phase_error = [&](double a) {
        return std::abs(wrap_phase(conditional_phase(block_at(a)) - pi));
    };
    out.amplitude = lo < hi ? golden_section(phase_error, lo, hi, opts.amplitude_tolerance)
                            : amps[j];

    const Matrix4c u = block_at(out.amplitude);
    out.conditional_phase = conditional_phase(u);
    out.r_refined = r_at(cfg, out.amplitude, out.drive_freq);
    out.leakage = 1.0 - u.squaredNorm() / 4.0;

    std::vector<double> phases(static_cast<std::size_t>(opts.local_z_points));
    for (std::size_t k = 0; k < phases.size(); ++k) {
        phases[k] = 2.0 * pi * static_cast<double>(k) / static_cast<double>(phases.size());
    }
    out.phi_zi = calibrate_local_z(simulate_local_z_curve(u, Qubit::control, 0, phases),
                                   simulate_local_z_curve(u, Qubit::control, 1, phases));
    out.phi_iz = calibrate_local_z(simulate_local_z_curve(u, Qubit::target, 0, phases),
                                   simulate_local_z_curve(u, Qubit::target, 1, phases));
    out.compiled = virtual_z(Qubit::control, out.phi_zi) * virtual_z(Qubit::target, out.phi_iz) * u;
    out.fidelity_uncorrected = average_gate_fidelity(u, ideal_cz());
    out.fidelity = average_gate_fidelity(out.compiled, ideal_cz());
    return out;
}

}  // namespace starkzz
