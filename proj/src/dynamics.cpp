#include "starkzz/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "starkzz/spectrum.hpp"
#include "starkzz/stats.hpp"

namespace starkzz {

using std::numbers::pi;

namespace {

constexpr double two_pi_per_mhz_ns = 2.0 * pi * 1e-3;

}  // namespace

void PulseShape::validate() const {
    if (!(total_duration > 0.0) || !std::isfinite(total_duration)) {
        throw InvalidParameter("PulseShape: total_duration must be positive");
    }
    if (!(flat_fraction >= 0.0 && flat_fraction <= 1.0)) {
        throw InvalidParameter("PulseShape: flat_fraction must lie in [0, 1]");
    }
}

double envelope(const PulseShape& shape, double t) {
    if (t < 0.0 || t > shape.total_duration) {
        return 0.0;
    }
    const double ramp = shape.ramp_duration();
    if (ramp <= 0.0) {
        return 1.0;
    }
    if (t < ramp) {
        return 0.5 * (1.0 - std::cos(pi * t / ramp));
    }
    const double fall_start = shape.total_duration - ramp;
    if (t > fall_start) {
        return 0.5 * (1.0 - std::cos(pi * (shape.total_duration - t) / ramp));
    }
    return 1.0;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DenseMatrix<cplx> unitary_step(const DenseMatrix<cplx>& h, double dt_ns) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix<cplx>> solver(h);
    const auto& v = solver.eigenvectors();
    const DenseVector<cplx> phases =
        (solver.eigenvalues() * (-two_pi_per_mhz_ns * dt_ns))
            .unaryExpr([](double a) { return std::polar(1.0, a); });
    return v * phases.asDiagonal() * v.adjoint();
}

DenseVector<cplx> bare_frame_phases(const SystemParams& sys, double drive_freq, double t_ns) {
    DenseVector<cplx> out(sys.dim());
    for (int nc = 0; nc < sys.control.levels; ++nc) {
        for (int nt = 0; nt < sys.target.levels; ++nt) {
            const double e = duffing_energy(sys.control, drive_freq, nc) +
                             duffing_energy(sys.target, drive_freq, nt);
            out(sys.index(nc, nt)) = std::polar(1.0, two_pi_per_mhz_ns * e * t_ns);
        }
    }
    return out;
}

namespace {

struct StepPlan {
    long count{0};
    double h{0.0};
};

StepPlan plan_steps(const ShapedPulse& pulse, double t0, double t1, double step) {
    pulse.shape.validate();
    if (!(step > 0.0)) {
        throw InvalidParameter("propagate: step must be positive");
    }
    if (step > pulse.shape.total_duration / 10.0) {
        throw StepTooCoarse("propagate: step " + std::to_string(step) +
                            " ns exceeds a tenth of the pulse duration");
    }
    if (!(t1 >= t0)) {
        throw InvalidParameter("propagate: interval end precedes its start");
    }
    const double span = t1 - t0;
    const long n = std::max(1L, static_cast<long>(std::ceil(span / step - 1e-9)));
    return {n, span / static_cast<double>(n)};
}

// Caches exp(−i2π(H0 + sHd)h) by envelope value; the fall mirrors the rise.
class StepCache {
public:
    StepCache(const SystemParams& sys, const DriveConfig& peak, double h)
        : h0_(static_hamiltonian(sys, peak.drive_freq)),
          hd_(drive_hamiltonian(sys, peak.eps_c, peak.eps_t)),
          h_(h) {}

    const DenseMatrix<cplx>& get(double s) {
        const auto key = std::llround(s * 1099511627776.0);  // 2^40
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, unitary_step(h0_ + s * hd_, h_)).first;
        }
        return it->second;
    }

private:
    DenseMatrix<cplx> h0_;
    DenseMatrix<cplx> hd_;
    double h_;
    std::unordered_map<long long, DenseMatrix<cplx>> cache_;
};

}  // namespace

DenseMatrix<cplx> propagate_columns(const SystemParams& sys, const ShapedPulse& pulse,
                                    const DenseMatrix<cplx>& initial, double t0, double t1,
                                    double step) {
    sys.validate();
    pulse.peak.validate();
    if (initial.rows() != sys.dim()) {
        throw InvalidParameter("propagate: initial states have the wrong dimension");
    }
    const auto plan = plan_steps(pulse, t0, t1, step);
    StepCache cache(sys, pulse.peak, plan.h);
    DenseMatrix<cplx> u = initial;
    DenseMatrix<cplx> tmp(u.rows(), u.cols());
    for (long k = 0; k < plan.count; ++k) {
        const double mid = t0 + (static_cast<double>(k) + 0.5) * plan.h;
        tmp.noalias() = cache.get(envelope(pulse.shape, mid)) * u;
        u.swap(tmp);
    }
    return u;
}

DenseMatrix<cplx> propagate_interval(const SystemParams& sys, const ShapedPulse& pulse, double t0,
                                     double t1, double step) {
    return propagate_columns(sys, pulse, DenseMatrix<cplx>::Identity(sys.dim(), sys.dim()), t0, t1,
                             step);
}

DenseMatrix<cplx> pulse_propagator(const SystemParams& sys, const ShapedPulse& pulse, double step) {
    return propagate_interval(sys, pulse, 0.0, pulse.shape.total_duration, step);
}

DenseMatrix<cplx> frame_propagator(const SystemParams& sys, const ShapedPulse& pulse, double step) {
    const auto frame = bare_frame_phases(sys, pulse.peak.drive_freq, pulse.shape.total_duration);
    return frame.asDiagonal() * pulse_propagator(sys, pulse, step);
}

DenseVector<cplx> propagate(const SystemParams& sys, const ShapedPulse& pulse,
                            const DenseVector<cplx>& initial, double step, Trajectory* trajectory) {
    sys.validate();
    pulse.peak.validate();
    if (initial.size() != sys.dim()) {
        throw InvalidParameter("propagate: initial state has the wrong dimension");
    }
    const auto plan = plan_steps(pulse, 0.0, pulse.shape.total_duration, step);
    StepCache cache(sys, pulse.peak, plan.h);
    DenseVector<cplx> psi = initial;
    if (trajectory != nullptr) {
        trajectory->times.assign(1, 0.0);
        trajectory->states.assign(1, psi);
    }
    for (long k = 0; k < plan.count; ++k) {
        const double mid = (static_cast<double>(k) + 0.5) * plan.h;
        psi = cache.get(envelope(pulse.shape, mid)) * psi;
        if (trajectory != nullptr) {
            trajectory->times.push_back(static_cast<double>(k + 1) * plan.h);
            trajectory->states.push_back(psi);
        }
    }
    return psi;
}

DenseVector<cplx> product_state(const SystemParams& sys, int n_control, int n_target) {
    if (n_control < 0 || n_control >= sys.control.levels || n_target < 0 ||
        n_target >= sys.target.levels) {
        throw InvalidParameter("product_state: level outside the truncation");
    }
    DenseVector<cplx> psi = DenseVector<cplx>::Zero(sys.dim());
    psi(sys.index(n_control, n_target)) = 1.0;
    return psi;
}

DenseVector<cplx> ramsey_input(const SystemParams& sys, int control_level) {
    return (product_state(sys, control_level, 0) + product_state(sys, control_level, 1)) /
           std::sqrt(2.0);
}

namespace {

BlochVector bloch_from_block(cplx rho00, cplx rho01, cplx rho11) {
    // ρ01 = ⟨0|ρ|1⟩; ⟨σx⟩ = 2Re ρ01, ⟨σy⟩ = −2Im ρ01
    return {2.0 * rho01.real(), -2.0 * rho01.imag(), (rho00 - rho11).real()};
}

}  // namespace

BlochVector target_bloch(const SystemParams& sys, const DenseVector<cplx>& state) {
    cplx r00{}, r01{}, r11{};
    for (int nc = 0; nc < sys.control.levels; ++nc) {
        const cplx a0 = state(sys.index(nc, 0));
        const cplx a1 = state(sys.index(nc, 1));
        r00 += std::norm(a0);
        r11 += std::norm(a1);
        r01 += a0 * std::conj(a1);
    }
    return bloch_from_block(r00, r01, r11);
}

BlochVector control_bloch(const SystemParams& sys, const DenseVector<cplx>& state) {
    cplx r00{}, r01{}, r11{};
    for (int nt = 0; nt < sys.target.levels; ++nt) {
        const cplx a0 = state(sys.index(0, nt));
        const cplx a1 = state(sys.index(1, nt));
        r00 += std::norm(a0);
        r11 += std::norm(a1);
        r01 += a0 * std::conj(a1);
    }
    return bloch_from_block(r00, r01, r11);
}

BlochVector conditional_bloch(const SystemParams& sys, const ShapedPulse& pulse, int control_level,
                              double step) {
    DenseVector<cplx> psi = propagate(sys, pulse, ramsey_input(sys, control_level), step);
    psi = bare_frame_phases(sys, pulse.peak.drive_freq, pulse.shape.total_duration)
              .cwiseProduct(psi);
    return target_bloch(sys, psi);
}

double r_metric(const BlochVector& r0, const BlochVector& r1) {
    return 0.5 * (r0.vec() - r1.vec()).squaredNorm();
}

namespace {

// Target precession frequencies (bare frame) for control in |0⟩ and |1⟩, MHz.
std::pair<double, double> expected_shifts(const SystemParams& sys, const DriveConfig& drive) {
    const auto dressed = labeled_spectrum(sys, drive);
    const double frame = sys.target.freq_01 - drive.drive_freq;
    return {dressed.energies.at({0, 1}) - dressed.energies.at({0, 0}) - frame,
            dressed.energies.at({1, 1}) - dressed.energies.at({1, 0}) - frame};
}

}  // namespace

RamseyResult ramsey_zz(const SystemParams& sys, const DriveConfig& drive,
                       const std::vector<double>& times_ns, const RamseyOptions& opts) {
    sys.validate();
    drive.validate();
    if (times_ns.size() < 32) {
        throw InsufficientData("ramsey_zz: need at least 32 evolution times");
    }
    double max_dt = 0.0;
    for (std::size_t i = 1; i < times_ns.size(); ++i) {
        const double dt = times_ns[i] - times_ns[i - 1];
        if (!(dt > 0.0)) {
            throw InvalidParameter("ramsey_zz: evolution times must be strictly increasing");
        }
        max_dt = std::max(max_dt, dt);
    }
    if (times_ns.front() < 0.0) {
        throw InvalidParameter("ramsey_zz: evolution times must be non-negative");
    }

    const auto [f0, f1] = expected_shifts(sys, drive);
    const double nyquist = 0.5 / (max_dt * 1e-3);
    if (std::max(std::abs(f0), std::abs(f1)) >= nyquist) {
        throw AliasingError("ramsey_zz: conditional shift " +
                            std::to_string(std::max(std::abs(f0), std::abs(f1))) +
                            " MHz exceeds the grid Nyquist frequency " + std::to_string(nyquist) +
                            " MHz");
    }

    // Ramp the drive on and off adiabatically around the constant segment.
    const double ramp = opts.ramp_ns;
    DenseMatrix<cplx> u_up = DenseMatrix<cplx>::Identity(sys.dim(), sys.dim());
    DenseMatrix<cplx> u_down = u_up;
    if (ramp > 0.0) {
        const ShapedPulse ramps{PulseShape{2.0 * ramp, 0.0}, drive};
        u_up = propagate_interval(sys, ramps, 0.0, ramp, opts.step);
        u_down = propagate_interval(sys, ramps, ramp, 2.0 * ramp, opts.step);
    }
    const auto eig = eigendecompose(build_hamiltonian(sys, drive));
    const DenseMatrix<cplx> v_dag = eig.vectors.adjoint();

    RamseyResult out;
    out.t_ns = times_ns;
    std::vector<double> raw0, raw1;
    std::array<DenseVector<cplx>, 2> after_up{v_dag * (u_up * ramsey_input(sys, 0)),
                                              v_dag * (u_up * ramsey_input(sys, 1))};
    for (double t : times_ns) {
        const DenseVector<cplx> evolve =
            (eig.values * (-two_pi_per_mhz_ns * t)).unaryExpr([](double a) {
                return std::polar(1.0, a);
            });
        const auto frame = bare_frame_phases(sys, drive.drive_freq, t + 2.0 * ramp);
        for (int n = 0; n < 2; ++n) {
            const DenseVector<cplx> psi =
                frame.cwiseProduct(u_down * (eig.vectors * evolve.cwiseProduct(after_up[n])));
            const auto r = target_bloch(sys, psi);
            (n == 0 ? raw0 : raw1).push_back(std::atan2(r.y, r.x));
        }
    }
    out.phase0 = unwrap(raw0);
    out.phase1 = unwrap(raw1);

    std::vector<double> t_us(times_ns.size());
    std::transform(times_ns.begin(), times_ns.end(), t_us.begin(), [](double t) { return 1e-3 * t; });
    out.freq0 = -linear_fit(t_us, out.phase0).slope / (2.0 * pi);
    out.freq1 = -linear_fit(t_us, out.phase1).slope / (2.0 * pi);
    out.zeta = out.freq1 - out.freq0;
    return out;
}

std::vector<double> ramsey_time_grid(const SystemParams& sys, const DriveConfig& drive, int points,
                                     double periods) {
    const auto [f0, f1] = expected_shifts(sys, drive);
    const double zeta = std::abs(f1 - f0);
    const double fmax = std::max({std::abs(f0), std::abs(f1), 1e-3});
    // span in ns: `periods` periods of ζ, at least 1 μs
    double span = zeta > 1e-6 ? periods * 1e3 / zeta : 1e3;
    span = std::max(span, 1e3);
    // keep the per-state phase advance below a quarter turn per sample
    const double max_dt = 0.25 * 1e3 / fmax;
    const int n = std::max(points, static_cast<int>(std::ceil(span / max_dt)) + 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = span * i / (n - 1);
    }
    return grid;
}

}  // namespace starkzz
