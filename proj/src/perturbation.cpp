#include "starkzz/perturbation.hpp"

#include <cmath>
#include <string>

namespace starkzz {

namespace {

void guard(double denom, const char* name) {
    if (std::abs(denom) < resonance_guard_mhz) {
        throw StraddledResonance(std::string("resonant denominator ") + name, name);
    }
}

}  // namespace

double zeta2(const SystemParams& sys) {
    sys.validate();
    const double delta = sys.detuning();
    const double lower = delta - sys.target.anharm;
    const double upper = delta + sys.control.anharm;
    guard(lower, "Delta - eta_t");
    guard(upper, "Delta + eta_c");
    const double j = sys.coupling_j;
    return 2.0 * j * j * (1.0 / lower - 1.0 / upper);
}

double zeta3(const SystemParams& sys, const DriveConfig& drive) {
    sys.validate();
    drive.validate();
    const double dc = drive.control_detuning(sys);
    const double dt = drive.target_detuning(sys);
    const double eta_c = sys.control.anharm;
    const double eta_t = sys.target.anharm;
    guard(dc, "Delta_c");
    guard(dt, "Delta_t");
    guard(dc + eta_c, "Delta_c + eta_c");
    guard(dt + eta_t, "Delta_t + eta_t");
    const double num = 8.0 * eta_t * eta_c * sys.coupling_j * std::abs(drive.eps_t) *
                       std::abs(drive.eps_c) * std::cos(drive.relative_phase());
    return num / (dc * dt * (dc + eta_c) * (dt + eta_t));
}

double zeta_pt_total(const SystemParams& sys, const DriveConfig& drive) {
    return zeta2(sys) + zeta3(sys, drive);
}

double cr_conditional_zz(const ConditionalAmplitudes& amps, double eps_t, double delta_t) {
    if (delta_t == 0.0) {
        throw ResonantDrive("cr_conditional_zz: drive is resonant with the target (delta_t = 0)");
    }
    const double on0 = amps.eps_tilde_0 + eps_t;
    const double on1 = amps.eps_tilde_1 + eps_t;
    return (on0 * on0 - on1 * on1) / delta_t;
}

}  // namespace starkzz
