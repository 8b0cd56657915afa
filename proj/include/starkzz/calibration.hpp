// calibration.hpp: R-metric sweeps, CZ pulse selection and local-Z correction.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "starkzz/crosstalk.hpp"
#include "starkzz/dynamics.hpp"

namespace starkzz {

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

// Computational block of a full propagator in the order |00⟩, |01⟩, |10⟩, |11⟩.
Matrix4c computational_block(const SystemParams& sys, const DenseMatrix<cplx>& u);

// arg(U₁₁ U₀₀ / (U₀₁ U₁₀)) of the diagonal, wrapped to (−π, π].
double conditional_phase(const Matrix4c& u);

// Average gate fidelity of `actual` against `ideal`, insensitive to global phase.
// Works for non-unitary (leaky) `actual`: F = (Tr MM† + |Tr M|²) / (d(d+1)), M = ideal†·actual.
double average_gate_fidelity(const Matrix4c& actual, const Matrix4c& ideal);

Matrix4c ideal_cz();

// VZ(φ) = diag(1, e^{iφ}) on the chosen qubit.
enum class Qubit { control, target };
Matrix4c virtual_z(Qubit qubit, double phi);

struct RSweepConfig {
    SystemParams sys;
    CrosstalkModel crosstalk;
    PulseShape shape;
    double phi_d{0.0};                 // relative line phase
    std::vector<double> amplitudes;    // global line amplitude A = A_c = A_t
    std::vector<double> drive_freqs;   // MHz
    double step{default_step_ns};
    int jobs{1};
};

struct RMap {
    std::vector<double> amplitudes;
    std::vector<double> drive_freqs;
    Eigen::MatrixXd r;                  // rows: drive_freqs, cols: amplitudes; NaN when flagged
    std::vector<std::string> notes;     // per cell (row-major), empty unless flagged

    std::size_t flagged_count() const;
    double max_over_amplitude(Eigen::Index freq_row) const;
};

ShapedPulse pulse_at(const RSweepConfig& cfg, double amplitude, double drive_freq);

// R for a single grid point; both control preparations share one propagator.
double r_at(const RSweepConfig& cfg, double amplitude, double drive_freq);

RMap sweep_r(const RSweepConfig& cfg);

// `a,freq_mhz,r_value`, one row per cell in grid order.
void write_rmap_csv(const RMap& map, std::ostream& os);

struct FrequencyBand {
    double lo{0.0};
    double hi{0.0};
    double width() const noexcept { return hi - lo; }
};

// Longest contiguous run of drive frequencies whose best R reaches `threshold`.
FrequencyBand r_band(const RMap& map, double threshold);

struct LocalZCurve {
    std::vector<double> phases;  // swept VZ angle, rad
    std::vector<double> values;  // measured ⟨Z⟩ after the x-basis rotation
};

// Fits each curve to c·cos(φ + φ₀) + d and returns the VZ angle that maps the
// partner-in-|0⟩ curve to its maximum and the partner-in-|1⟩ curve to its minimum,
// averaged between the two fits. Throws LowContrast if |c| < 0.1 for either curve.
double calibrate_local_z(const LocalZCurve& partner0, const LocalZCurve& partner1);

// Simulates the local-phase experiment on a computational block: `qubit` in |+⟩,
// its partner in |k⟩, apply u then VZ(φ) on `qubit`, record ⟨X⟩ of `qubit`.
LocalZCurve simulate_local_z_curve(const Matrix4c& u, Qubit qubit, int partner_level,
                                   const std::vector<double>& phases);

struct CzCalibrationOptions {
    double min_r{1.5};
    double band_threshold{1.9};
    double amplitude_tolerance{1e-6};  // relative, golden-section stop
    int local_z_points{32};
};

struct CzCalibration {
    RMap map;
    FrequencyBand band;
    double amplitude{0.0};       // refined A*
    double drive_freq{0.0};      // ω_d*
    double r_grid_max{0.0};
    double r_refined{0.0};
    double conditional_phase{0.0};
    double phi_zi{0.0};          // VZ on the control
    double phi_iz{0.0};          // VZ on the target
    double fidelity_uncorrected{0.0};
    double fidelity{0.0};        // compiled gate vs CZ
    double leakage{0.0};         // 1 − mean computational-block population
    Matrix4c compiled;
};

CzCalibration calibrate_cz(const RSweepConfig& cfg, const CzCalibrationOptions& opts = {});

}  // namespace starkzz
