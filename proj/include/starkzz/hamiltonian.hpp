// hamiltonian.hpp: Duffing-oscillator model of two driven, exchange-coupled transmons.
//
// Every frequency and amplitude is an ordinary frequency in MHz. Operators are
// therefore H/2π and eigenvalue differences read directly in MHz. Time evolution
// elsewhere multiplies by 2π explicitly.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "starkzz/errors.hpp"

namespace starkzz {

using cplx = std::complex<double>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct TransmonParams {
    double freq_01{0.0};  // MHz
    double anharm{0.0};   // MHz, negative for transmons
    int levels{7};

    void validate() const;
};

struct SystemParams {
    TransmonParams control;  // higher-frequency transmon
    TransmonParams target;
    double coupling_j{0.0};  // MHz

    void validate() const;
    // Δ = ω_c − ω_t
    double detuning() const noexcept { return control.freq_01 - target.freq_01; }
    Eigen::Index dim() const noexcept {
        return static_cast<Eigen::Index>(control.levels) * target.levels;
    }
    // Row of the product state |n_c, n_t⟩; the control is the outer tensor factor.
    Eigen::Index index(int n_control, int n_target) const noexcept {
        return static_cast<Eigen::Index>(n_control) * target.levels + n_target;
    }
};

struct DriveConfig {
    double drive_freq{0.0};  // MHz
    cplx eps_c{0.0, 0.0};    // MHz, multiplies a_c
    cplx eps_t{0.0, 0.0};    // MHz, multiplies a_t

    void validate() const;
    // φ_d = arg(ε_t) − arg(ε_c)
    double relative_phase() const { return std::arg(eps_t) - std::arg(eps_c); }
    // Δ_i = ω_i − ω_d
    double control_detuning(const SystemParams& sys) const { return sys.control.freq_01 - drive_freq; }
    double target_detuning(const SystemParams& sys) const { return sys.target.freq_01 - drive_freq; }
};

// Dense complex matrix checked to equal its conjugate transpose.
class HermitianOperator {
public:
    static constexpr double default_tolerance = 1e-12;

    explicit HermitianOperator(DenseMatrix<cplx> entries, double rel_tol = default_tolerance);

    const DenseMatrix<cplx>& matrix() const noexcept { return entries_; }
    Eigen::Index dim() const noexcept { return entries_.rows(); }

private:
    DenseMatrix<cplx> entries_;
};

// max |H − H†| relative to max |H|; 0 for the zero matrix.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& h) {
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        return 0.0;
    }
    return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

template <typename Scalar>
struct LadderPair {
    DenseMatrix<Scalar> a;
    DenseMatrix<Scalar> a_dagger;
};

// Truncated annihilation operator, a[n−1, n] = √n.
template <typename Scalar = cplx>
LadderPair<Scalar> ladder_operator(int levels) {
    if (levels < 2) {
        throw InvalidParameter("ladder_operator: truncation must keep at least 2 levels");
    }
    DenseMatrix<Scalar> a = DenseMatrix<Scalar>::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) {
        a(n - 1, n) = Scalar(std::sqrt(static_cast<double>(n)));
    }
    DenseMatrix<Scalar> ad = a.adjoint();
    return {std::move(a), std::move(ad)};
}

// Bare Duffing energy of |n⟩ in the drive frame.
inline double duffing_energy(const TransmonParams& q, double drive_freq, int n) {
    return n * (q.freq_01 - drive_freq) + 0.5 * q.anharm * n * (n - 1);
}

// Drive-independent part: Duffing terms in the drive frame plus the exchange coupling.
DenseMatrix<cplx> static_hamiltonian(const SystemParams& sys, double drive_freq);

// ε_c a_c + ε_c* a_c† + ε_t a_t + ε_t* a_t†
DenseMatrix<cplx> drive_hamiltonian(const SystemParams& sys, cplx eps_c, cplx eps_t);

// Full time-independent drive-frame Hamiltonian for constant amplitudes.
HermitianOperator build_hamiltonian(const SystemParams& sys, const DriveConfig& drive);

// The two device pairs characterized in the reference measurements.
SystemParams reference_pair_1(int levels = 7);  // ζ₀ ≈ 307 kHz
SystemParams reference_pair_2(int levels = 7);  // ζ₀ ≈ 170 kHz, used for the CZ gate

}  // namespace starkzz
