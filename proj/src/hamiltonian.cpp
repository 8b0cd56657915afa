#include "starkzz/hamiltonian.hpp"

#include <cmath>
#include <string>

namespace starkzz {

void TransmonParams::validate() const {
    if (levels < 3) {
        throw InvalidParameter("TransmonParams: levels must be >= 3, got " + std::to_string(levels));
    }
    if (!(anharm < 0.0)) {
        throw InvalidParameter("TransmonParams: anharmonicity must be negative");
    }
    if (!(freq_01 > 0.0) || !std::isfinite(freq_01)) {
        throw InvalidParameter("TransmonParams: freq_01 must be positive");
    }
}

void SystemParams::validate() const {
    control.validate();
    target.validate();
    if (!(control.freq_01 > target.freq_01)) {
        throw InvalidParameter("SystemParams: control must be the higher-frequency transmon");
    }
    if (!(coupling_j >= 0.0) || !std::isfinite(coupling_j)) {
        throw InvalidParameter("SystemParams: coupling_J must be >= 0");
    }
}

void DriveConfig::validate() const {
    if (!(drive_freq > 0.0) || !std::isfinite(drive_freq)) {
        throw InvalidParameter("DriveConfig: drive_freq must be positive");
    }
    auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(eps_c) || !finite(eps_t)) {
        throw InvalidParameter("DriveConfig: drive amplitudes must be finite");
    }
}

HermitianOperator::HermitianOperator(DenseMatrix<cplx> entries, double rel_tol)
    : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw ContractViolation("HermitianOperator: matrix must be square and non-empty");
    }
    if (hermiticity_defect(entries_) > rel_tol) {
        throw ContractViolation("HermitianOperator: matrix is not Hermitian");
    }
}

namespace {

DenseMatrix<cplx> identity(int n) { return DenseMatrix<cplx>::Identity(n, n); }

DenseMatrix<cplx> kron(const DenseMatrix<cplx>& a, const DenseMatrix<cplx>& b) {
    DenseMatrix<cplx> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

DenseMatrix<cplx> static_hamiltonian(const SystemParams& sys, double drive_freq) {
    sys.validate();
    const int lc = sys.control.levels;
    const int lt = sys.target.levels;
    DenseMatrix<cplx> h = DenseMatrix<cplx>::Zero(sys.dim(), sys.dim());
    for (int nc = 0; nc < lc; ++nc) {
        for (int nt = 0; nt < lt; ++nt) {
            const auto k = sys.index(nc, nt);
            h(k, k) = duffing_energy(sys.control, drive_freq, nc) +
                      duffing_energy(sys.target, drive_freq, nt);
        }
    }
    if (sys.coupling_j != 0.0) {
        const auto ac = kron(ladder_operator(lc).a, identity(lt));
        const auto at = kron(identity(lc), ladder_operator(lt).a);
        h += sys.coupling_j * (ac.adjoint() * at + ac * at.adjoint());
    }
    return h;
}

DenseMatrix<cplx> drive_hamiltonian(const SystemParams& sys, cplx eps_c, cplx eps_t) {
    const int lc = sys.control.levels;
    const int lt = sys.target.levels;
    const auto ac = kron(ladder_operator(lc).a, identity(lt));
    const auto at = kron(identity(lc), ladder_operator(lt).a);
    DenseMatrix<cplx> h = eps_c * ac + eps_t * at;
    return h + DenseMatrix<cplx>(h.adjoint());
}

HermitianOperator build_hamiltonian(const SystemParams& sys, const DriveConfig& drive) {
    sys.validate();
    drive.validate();
    return HermitianOperator(static_hamiltonian(sys, drive.drive_freq) +
                             drive_hamiltonian(sys, drive.eps_c, drive.eps_t));
}

SystemParams reference_pair_1(int levels) {
    return SystemParams{{5845.0, -244.1, levels}, {5690.0, -247.1, levels}, 3.45};
}

SystemParams reference_pair_2(int levels) {
    return SystemParams{{5469.6, -270.5, levels}, {5315.0, -273.0, levels}, 2.79};
}

}  // namespace starkzz
