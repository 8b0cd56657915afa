// crosstalk.hpp: line-amplitude to on-chip-field mixing and its least-squares fit.
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "starkzz/hamiltonian.hpp"

namespace starkzz {

// M = [[e^{iθ_c}, C_ct e^{iφ_ct}], [C_tc e^{iφ_tc}, 1]]
struct CrosstalkMatrix {
    double c_ct{0.0};
    double phi_ct{0.0};
    double c_tc{0.0};
    double phi_tc{0.0};
    double theta_c{0.0};

    static CrosstalkMatrix identity() { return {}; }
    DenseMatrix<cplx> matrix() const;
    // Non-negative magnitudes, phases wrapped to (−π, π].
    CrosstalkMatrix canonical() const;
};

// Crosstalk plus the device-unit → MHz scale.
struct CrosstalkModel {
    CrosstalkMatrix xt;
    double scale{1.0};  // MHz per device unit
};

// Wraps an angle into (−π, π].
double wrap_phase(double phi);

// (ε_c, ε_t) = scale · M · (A_c, A_t e^{−iφ_d})
std::pair<cplx, cplx> apply_crosstalk(const CrosstalkMatrix& xt, double a_c, double a_t,
                                      double phi_d, double scale);

inline std::pair<cplx, cplx> apply_crosstalk(const CrosstalkModel& m, double a_c, double a_t,
                                             double phi_d) {
    return apply_crosstalk(m.xt, a_c, a_t, phi_d, m.scale);
}

struct ZZSweepPoint {
    double a_c{0.0};
    double a_t{0.0};
    double phi_d{0.0};
    double zeta_measured{0.0};  // MHz
    double zeta_uncertainty{1.0};  // MHz, > 0
};

// ζ predicted by exact diagonalization for one sweep point.
double model_zeta(const SystemParams& sys, double drive_freq, const CrosstalkModel& model,
                  const ZZSweepPoint& point);

struct CrosstalkFitOptions {
    int restarts{4};          // phase-shifted initializations
    int max_evaluations{3000};
};

struct CrosstalkFitResult {
    CrosstalkModel model;
    // σ of (c_ct, φ_ct, c_tc, φ_tc, θ_c, scale)
    std::array<double, 6> uncertainty{};
    double chi_square{0.0};
    double residual_ss{0.0};  // unweighted Σ(ζ_model − ζ_measured)², MHz²
    int evaluations{0};
    bool converged{false};
};

// Minimizes Σ[(ζ_model − ζ_measured)/σ]² over the crosstalk matrix and the scale.
CrosstalkFitResult fit_crosstalk(const std::vector<ZZSweepPoint>& data, const SystemParams& sys,
                                 double drive_freq, const CrosstalkModel& initial,
                                 const CrosstalkFitOptions& opts = {});

}  // namespace starkzz
