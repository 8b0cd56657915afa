// spectrum.hpp: dressed spectrum, bare-state labeling and the ZZ rate.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>

#include "starkzz/hamiltonian.hpp"

namespace starkzz {

struct Eigensystem {
    Eigen::VectorXd values;     // ascending, MHz
    DenseMatrix<cplx> vectors;  // columns
};

// Dense Hermitian diagonalization. Throws ContractViolation on non-Hermitian input.
Eigensystem eigendecompose(const HermitianOperator& h);
Eigensystem eigendecompose(const DenseMatrix<cplx>& h);

// (n_control, n_target)
using BareLabel = std::pair<int, int>;

inline constexpr std::array<BareLabel, 4> computational_labels{
    BareLabel{0, 0}, BareLabel{0, 1}, BareLabel{1, 0}, BareLabel{1, 1}};

enum class LabelFlag {
    none,
    continuation,  // some best overlap < 0.5; assigned by overlap with the reference
    low_overlap,   // some best overlap < 0.5 and no reference was available
};

const char* to_string(LabelFlag flag);

struct LabeledSpectrum {
    std::map<BareLabel, double> energies;             // MHz
    std::map<BareLabel, double> overlaps;             // |⟨bare|dressed⟩|², in [0, 1]
    std::map<BareLabel, DenseVector<cplx>> states;    // assigned dressed eigenvectors
    LabelFlag flag{LabelFlag::none};

    bool flagged() const noexcept { return flag != LabelFlag::none; }
    double min_overlap() const;
    // E11 + E00 − E01 − E10
    double zz() const;
};

// Assigns each computational bare state the eigenvector it overlaps most. If any
// best overlap drops below 0.5 and a reference (e.g. the previous point of a sweep)
// is given, the assignment follows the reference eigenvectors instead.
LabeledSpectrum label_states(const Eigensystem& spectrum, const SystemParams& sys,
                             const LabeledSpectrum* reference = nullptr);

LabeledSpectrum labeled_spectrum(const SystemParams& sys, const DriveConfig& drive,
                                 const LabeledSpectrum* reference = nullptr);

// ζ = E11 + E00 − E01 − E10 in MHz, sign as computed.
double zz_rate(const SystemParams& sys, const DriveConfig& drive);

}  // namespace starkzz
