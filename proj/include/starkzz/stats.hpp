#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace starkzz {

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

// Ordinary least squares y ≈ slope·x + intercept.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_fit: need at least two paired samples");
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = x[static_cast<std::size_t>(i)];
        a(i, 1) = 1.0;
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
    const double ss_res = (a * c - b).squaredNorm();
    const double ss_tot = (b.array() - b.mean()).square().sum();
    return {c(0), c(1), ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

// Removes 2π jumps between consecutive samples.
inline std::vector<double> unwrap(std::span<const double> phases) {
    std::vector<double> out(phases.begin(), phases.end());
    for (std::size_t i = 1; i < out.size(); ++i) {
        double d = out[i] - out[i - 1];
        d = std::remainder(d, 2.0 * std::numbers::pi);
        out[i] = out[i - 1] + d;
    }
    return out;
}

struct SinusoidFit {
    double offset{0.0};     // c₀
    double amplitude{0.0};  // c₁ ≥ 0
    double phase{0.0};      // φ₀
    double rms_residual{0.0};
};

// y ≈ c₀ + c₁ cos(φ + φ₀), solved linearly in (c₀, c₁cosφ₀, c₁sinφ₀).
inline SinusoidFit sinusoid_fit(std::span<const double> phi, std::span<const double> y) {
    if (phi.size() != y.size() || phi.size() < 3) {
        throw std::invalid_argument("sinusoid_fit: need at least three paired samples");
    }
    const auto n = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = phi[static_cast<std::size_t>(i)];
        a(i, 0) = 1.0;
        a(i, 1) = std::cos(p);
        a(i, 2) = -std::sin(p);
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
    SinusoidFit out;
    out.offset = c(0);
    out.amplitude = std::hypot(c(1), c(2));
    out.phase = std::atan2(c(2), c(1));
    out.rms_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(n));
    return out;
}

}  // namespace starkzz
