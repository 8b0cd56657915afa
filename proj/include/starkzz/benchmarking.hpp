// benchmarking.hpp: randomized-benchmarking family analysis.
//
// Exponential decay fits P(m) = A·pᵐ (A always free, so SPAM drops out), IRB/CB
// fidelity arithmetic, the XRB coherent/stochastic split, leakage rate-equation
// fits, a coherence-limited infidelity estimate, and a seeded binomial
// generator for validating the fitters.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace starkzz {

enum class DecayKind { rb, irb, cb_pauli, purity, leakage_pop };

struct DecayDataset {
    std::vector<int> lengths;                 // strictly increasing
    std::vector<std::vector<double>> values;  // samples per length, each in [0, 1]
    DecayKind kind{DecayKind::rb};
    std::string label;                        // Pauli label for cb_pauli
    std::optional<int> shots;                 // per sample, when known

    void validate() const;
    std::vector<double> means() const;
    std::size_t sample_count() const;
};

struct DecayFit {
    double a{0.0};
    double p{0.0};
    double sigma_a{0.0};
    double sigma_p{0.0};
    double chi_square{0.0};
    bool clamped{false};  // unconstrained optimum had p > 1
};

DecayFit fit_decay(const DecayDataset& data);

struct FidelityEstimate {
    double fidelity{0.0};
    bool warning{false};  // inputs outside 0 < p_int ≤ p_ref ≤ 1
};

// r = (d−1)/d·(1 − p_int/p_ref), F = 1 − r.
FidelityEstimate interleaved_fidelity(double p_ref, double p_int, int d);

struct CbAnalysis {
    std::map<std::string, double> error_rates;  // e_i = (1 − p_i)(1 − 1/d²)
    double mean_decay{0.0};                     // p̄
    double process_infidelity{0.0};             // (1 − p̄)(1 − 1/d²)
};

CbAnalysis cb_analyze(const std::map<std::string, double>& pauli_decays, int d);

struct ErrorBudget {
    double e_f{0.0};  // process infidelity
    double e_s{0.0};  // stochastic
    double e_u{0.0};  // coherent
    bool floored{false};

    // Split with e_u = e_f − e_s.
    static ErrorBudget from_infidelities(double e_f, double e_s);
};

// e_f = (1−p)(1−1/d²), e_s = (1−√u)(1−1/d²), e_u = e_f − e_s (floored at 0).
ErrorBudget xrb_decompose(double p_rb, double unitarity, int d);

struct LeakageFit {
    double a{0.0};
    double b{0.0};
    double gamma{0.0};       // Γ = γ↑ + γ↓
    double gamma_up{0.0};    // leakage per step
    double gamma_down{0.0};  // seepage per step
    double sigma_b{0.0};
    double sigma_gamma{0.0};
    double sigma_up{0.0};
    double sigma_down{0.0};
    double chi_square{0.0};
};

// P₂(m) = B − A·e^{−Γm}, γ↑ = BΓ, γ↓ = Γ − γ↑.
LeakageFit lrb_fit(const DecayDataset& data);

struct LeakageRate {
    double rate{0.0};
    bool floored{false};
};

// γ↑(interleaved) − γ↑(reference), floored at 0.
LeakageRate leakage_per_gate(double gamma_up_interleaved, double gamma_up_reference);

// Process infidelity from T₁/T₂ over one gate (times in μs; infinities allowed).
// Per qubit F = 1/2 + e^{−t/T₂}/3 + e^{−t/T₁}/6; e = (1 − ΠF)(d+1)/d.
struct CoherenceLimit {
    double infidelity{0.0};
    bool warning{false};  // some T₂ > 2T₁
};

CoherenceLimit coherence_limit(double t1_c, double t2_c, double t1_t, double t2_t,
                               double gate_len, int d);

struct ExponentialModel {
    double a{1.0};
    double p{1.0};
};

struct LeakageModel {
    double a{0.0};
    double b{0.0};
    double gamma{0.0};
};

using DecayModel = std::variant<ExponentialModel, LeakageModel>;

double evaluate(const DecayModel& model, int m);

// Binomial sampling of the model; shots == nullopt returns exact model values.
DecayDataset synth_decay(const DecayModel& model, const std::vector<int>& lengths,
                         std::optional<int> shots, std::uint64_t seed,
                         int samples_per_length = 1);

}  // namespace starkzz
