// perturbation.hpp: closed-form ZZ estimates.
//
// zeta2 is the static exchange-mediated term, zeta3 the leading drive-induced
// correction (requires both transmons driven). cr_conditional_zz is the
// conditional-Stark picture in which the target sees a control-state-dependent
// drive ε̃_n plus its own direct drive ε_t.
#pragma once

#include "starkzz/hamiltonian.hpp"

namespace starkzz {

// Denominators smaller than this (MHz) are treated as resonant.
inline constexpr double resonance_guard_mhz = 1e-6;

// ζ⁽²⁾ = 2J²(1/(Δ−η_t) − 1/(Δ+η_c))
double zeta2(const SystemParams& sys);

// ζ⁽³⁾ = 8 η_t η_c J |ε_t||ε_c| cos φ / [Δ_c Δ_t (Δ_c+η_c)(Δ_t+η_t)]
double zeta3(const SystemParams& sys, const DriveConfig& drive);

double zeta_pt_total(const SystemParams& sys, const DriveConfig& drive);

struct ConditionalAmplitudes {
    double eps_tilde_0{0.0};  // MHz, target drive seen with the control in |0⟩
    double eps_tilde_1{0.0};  // MHz, ... in |1⟩

    // CR rate μ = (ε̃₀ − ε̃₁)/2
    double mu() const noexcept { return 0.5 * (eps_tilde_0 - eps_tilde_1); }
};

// ζ = [(ε̃₀+ε_t)² − (ε̃₁+ε_t)²]/Δ_t, real-amplitude model.
double cr_conditional_zz(const ConditionalAmplitudes& amps, double eps_t, double delta_t);

}  // namespace starkzz
