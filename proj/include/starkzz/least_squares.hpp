// least_squares.hpp: nonlinear least squares with a finite-difference Jacobian.
//
// Thin wrapper around Eigen's (unsupported) MINPACK-style Levenberg–Marquardt that
// adds a relative-step central-difference Jacobian and a covariance estimate.
#pragma once

#include <functional>

#include <Eigen/Dense>

namespace starkzz {

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
    double xtol{1e-8};          // relative step
    double gtol{1e-10};         // gradient (cosine) test
    double ftol{1e-14};
    int max_evaluations{4000};
    // h_j = fd_relative_step · max(|x_j|, 1)
    double fd_relative_step{1e-6};
};

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd jacobian;  // at params
    double cost{0.0};          // Σ r²
    int evaluations{0};
    int status{0};             // Eigen::LevenbergMarquardtSpace::Status
    bool converged{false};

    // (JᵀJ)⁻¹ via a rank-revealing pseudo-inverse. Multiply by cost/dof when the
    // residuals are not already normalized by known uncertainties.
    Eigen::MatrixXd covariance() const;
};

Eigen::MatrixXd finite_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& fx,
                                           const LeastSquaresOptions& opts);

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       Eigen::Index n_residuals,
                                       const LeastSquaresOptions& opts = {});

}  // namespace starkzz
