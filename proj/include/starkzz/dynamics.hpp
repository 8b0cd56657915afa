// dynamics.hpp: shaped-pulse evolution, conditional Bloch vectors and Ramsey ZZ.
//
// Times are in ns, frequencies in MHz: a phase accumulated over t is 2π·f·t·1e−3.
// Propagators are returned in the bare rotating frame of each transmon, i.e. the
// drive-frame propagator followed by exp(+i 2π H_bare t), so that idle qubits
// have stationary Bloch vectors.
#pragma once

#include <vector>

#include "starkzz/hamiltonian.hpp"

namespace starkzz {

inline constexpr double default_step_ns = 0.05;

// Raised-cosine ramps around a flat top; flat_fraction of the total is flat.
struct PulseShape {
    double total_duration{201.0};  // ns
    double flat_fraction{0.4};

    void validate() const;
    double ramp_duration() const noexcept { return 0.5 * (1.0 - flat_fraction) * total_duration; }
    // ∫ envelope dt
    double area() const noexcept { return total_duration * (flat_fraction + 0.5 * (1.0 - flat_fraction)); }
};

// Envelope in [0, 1]; zero outside [0, total_duration].
double envelope(const PulseShape& shape, double t);

// Peak amplitudes scaled by the envelope.
struct ShapedPulse {
    PulseShape shape;
    DriveConfig peak;
};

struct BlochVector {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    double norm() const;
    Eigen::Vector3d vec() const { return {x, y, z}; }
};

// exp(−i 2π H dt) for a Hermitian H in MHz and dt in ns.
DenseMatrix<cplx> unitary_step(const DenseMatrix<cplx>& h, double dt_ns);

// Diagonal of exp(+i 2π H_bare t): removes the uncoupled, undriven drive-frame phases.
DenseVector<cplx> bare_frame_phases(const SystemParams& sys, double drive_freq, double t_ns);

// Drive-frame propagator over [t0, t1] with piecewise-constant midpoint steps.
// The step is shrunk so that an integer number of steps covers the interval.
// Throws StepTooCoarse when step > total_duration / 10.
DenseMatrix<cplx> propagate_interval(const SystemParams& sys, const ShapedPulse& pulse, double t0,
                                     double t1, double step = default_step_ns);

// Evolves the columns of `initial` over [t0, t1] (drive frame).
DenseMatrix<cplx> propagate_columns(const SystemParams& sys, const ShapedPulse& pulse,
                                    const DenseMatrix<cplx>& initial, double t0, double t1,
                                    double step = default_step_ns);

// Full pulse, drive frame.
DenseMatrix<cplx> pulse_propagator(const SystemParams& sys, const ShapedPulse& pulse,
                                   double step = default_step_ns);

// Full pulse, bare rotating frame.
DenseMatrix<cplx> frame_propagator(const SystemParams& sys, const ShapedPulse& pulse,
                                   double step = default_step_ns);

struct Trajectory {
    std::vector<double> times;                 // ns, including 0 and the end
    std::vector<DenseVector<cplx>> states;     // drive frame
};

// Propagates a state through the pulse (drive frame). Trajectory is recorded when requested.
DenseVector<cplx> propagate(const SystemParams& sys, const ShapedPulse& pulse,
                            const DenseVector<cplx>& initial, double step = default_step_ns,
                            Trajectory* trajectory = nullptr);

// |n_c, n_t⟩ as a vector.
DenseVector<cplx> product_state(const SystemParams& sys, int n_control, int n_target);

// Control in |n⟩, target in (|0⟩+|1⟩)/√2.
DenseVector<cplx> ramsey_input(const SystemParams& sys, int control_level);

// Target Bloch vector from the target's {0,1} block after tracing out the control.
// Population outside that block is dropped, so leakage shortens the vector.
BlochVector target_bloch(const SystemParams& sys, const DenseVector<cplx>& state);

// Control Bloch vector, symmetric to target_bloch.
BlochVector control_bloch(const SystemParams& sys, const DenseVector<cplx>& state);

// Target Bloch vector after the pulse with the control prepared in |n⟩.
BlochVector conditional_bloch(const SystemParams& sys, const ShapedPulse& pulse, int control_level,
                              double step = default_step_ns);

// R = ‖r₀ − r₁‖²/2
double r_metric(const BlochVector& r0, const BlochVector& r1);

struct RamseyOptions {
    double ramp_ns{20.0};  // raised-cosine on/off ramps around the constant segment
    double step{default_step_ns};
};

struct RamseyResult {
    double zeta{0.0};  // MHz
    double freq0{0.0};  // target frequency shift with control in |0⟩, MHz
    double freq1{0.0};
    std::vector<double> t_ns;    // constant-segment durations
    std::vector<double> phase0;  // unwrapped target phase, rad
    std::vector<double> phase1;
};

// Simulated Ramsey measurement of the conditional target frequency shift under a
// constant drive. ζ = f₁ − f₀ where f_n = −(dφ_n/dt)/2π.
RamseyResult ramsey_zz(const SystemParams& sys, const DriveConfig& drive,
                       const std::vector<double>& times_ns, const RamseyOptions& opts = {});

// Evenly spaced grid covering `periods` periods of the expected shift with a
// sampling interval safely below the Nyquist limit of the per-state frequencies.
std::vector<double> ramsey_time_grid(const SystemParams& sys, const DriveConfig& drive,
                                     int points = 64, double periods = 2.5);

}  // namespace starkzz
