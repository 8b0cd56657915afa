#include "starkzz/spectrum.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace starkzz {

const char* to_string(LabelFlag flag) {
    switch (flag) {
        case LabelFlag::none: return "none";
        case LabelFlag::continuation: return "continuation";
        case LabelFlag::low_overlap: return "low_overlap";
    }
    return "unknown";
}

Eigensystem eigendecompose(const DenseMatrix<cplx>& h) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw ContractViolation("eigendecompose: matrix must be square and non-empty");
    }
    if (hermiticity_defect(h) > HermitianOperator::default_tolerance) {
        throw ContractViolation("eigendecompose: input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix<cplx>> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecompose: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem eigendecompose(const HermitianOperator& h) { return eigendecompose(h.matrix()); }

double LabeledSpectrum::min_overlap() const {
    double m = 1.0;
    for (const auto& [label, ov] : overlaps) {
        m = std::min(m, ov);
    }
    return m;
}

double LabeledSpectrum::zz() const {
    return energies.at({1, 1}) + energies.at({0, 0}) - energies.at({0, 1}) - energies.at({1, 0});
}

namespace {

std::vector<BareLabel> collisions(const std::map<BareLabel, Eigen::Index>& pick) {
    std::vector<BareLabel> out;
    for (auto i = pick.begin(); i != pick.end(); ++i) {
        for (auto j = std::next(i); j != pick.end(); ++j) {
            if (i->second == j->second) {
                out.push_back(i->first);
                out.push_back(j->first);
            }
        }
    }
    return out;
}

std::string describe(const std::vector<BareLabel>& labels) {
    std::string s;
    for (const auto& [c, t] : labels) {
        s += " |" + std::to_string(c) + std::to_string(t) + ">";
    }
    return s;
}

}  // namespace

LabeledSpectrum label_states(const Eigensystem& spectrum, const SystemParams& sys,
                             const LabeledSpectrum* reference) {
    const auto& vecs = spectrum.vectors;
    if (vecs.rows() != sys.dim()) {
        throw ContractViolation("label_states: spectrum dimension does not match the system");
    }

    std::map<BareLabel, Eigen::Index> pick;
    std::map<BareLabel, double> best;
    bool low = false;
    for (const auto& label : computational_labels) {
        const auto row = sys.index(label.first, label.second);
        Eigen::Index k = 0;
        const double ov = vecs.row(row).cwiseAbs2().maxCoeff(&k);
        pick[label] = k;
        best[label] = ov;
        low = low || ov < 0.5;
    }

    LabeledSpectrum out;
    if (low && reference != nullptr) {
        out.flag = LabelFlag::continuation;
        for (const auto& label : computational_labels) {
            const auto& ref = reference->states.at(label);
            Eigen::Index k = 0;
            (vecs.adjoint() * ref).cwiseAbs2().maxCoeff(&k);
            pick[label] = k;
        }
    } else if (low) {
        out.flag = LabelFlag::low_overlap;
    }

    if (const auto bad = collisions(pick); !bad.empty()) {
        throw LabelingFailure("label_states: labels claim the same eigenvector:" + describe(bad), bad);
    }

    for (const auto& label : computational_labels) {
        const auto k = pick[label];
        const auto row = sys.index(label.first, label.second);
        out.energies[label] = spectrum.values(k);
        out.overlaps[label] = std::norm(vecs(row, k));
        out.states[label] = vecs.col(k);
    }
    return out;
}

LabeledSpectrum labeled_spectrum(const SystemParams& sys, const DriveConfig& drive,
                                 const LabeledSpectrum* reference) {
    return label_states(eigendecompose(build_hamiltonian(sys, drive)), sys, reference);
}

double zz_rate(const SystemParams& sys, const DriveConfig& drive) {
    return labeled_spectrum(sys, drive).zz();
}

}  // namespace starkzz
