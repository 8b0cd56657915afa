#include "starkzz/least_squares.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace starkzz {

Eigen::MatrixXd finite_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& fx,
                                           const LeastSquaresOptions& opts) {
    Eigen::MatrixXd jac(fx.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = opts.fd_relative_step * std::max(std::abs(x(j)), 1.0);
        xp(j) = x(j) + h;
        const Eigen::VectorXd up = f(xp);
        xp(j) = x(j) - h;
        const Eigen::VectorXd down = f(xp);
        xp(j) = x(j);
        jac.col(j) = (up - down) / (2.0 * h);
    }
    return jac;
}

namespace {

struct Adapter : Eigen::DenseFunctor<double> {
    Adapter(const ResidualFunction& f, int n, int m, const LeastSquaresOptions& o, int& count)
        : Eigen::DenseFunctor<double>(n, m), fn(f), opts(o), evaluations(count) {}

    int operator()(const InputType& x, ValueType& fvec) const {
        fvec = fn(x);
        ++evaluations;
        return 0;
    }

    int df(const InputType& x, JacobianType& fjac) const {
        const Eigen::VectorXd fx = fn(x);
        fjac = finite_difference_jacobian(fn, x, fx, opts);
        evaluations += 1 + 2 * static_cast<int>(x.size());
        return 0;
    }

    const ResidualFunction& fn;
    const LeastSquaresOptions& opts;
    int& evaluations;
};

}  // namespace

Eigen::MatrixXd LeastSquaresResult::covariance() const {
    const Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    return jtj.completeOrthogonalDecomposition().pseudoInverse();
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       Eigen::Index n_residuals, const LeastSquaresOptions& opts) {
    int count = 0;
    Adapter adapter(f, static_cast<int>(x0.size()), static_cast<int>(n_residuals), opts, count);
    Eigen::LevenbergMarquardt<Adapter> lm(adapter);
    lm.setXtol(opts.xtol);
    lm.setGtol(opts.gtol);
    lm.setFtol(opts.ftol);
    lm.setMaxfev(opts.max_evaluations);

    Eigen::VectorXd x = x0;
    const auto status = lm.minimize(x);

    LeastSquaresResult out;
    out.params = x;
    out.residuals = f(x);
    out.jacobian = finite_difference_jacobian(f, x, out.residuals, opts);
    out.cost = out.residuals.squaredNorm();
    out.evaluations = count;
    out.status = static_cast<int>(status);
    using namespace Eigen::LevenbergMarquardtSpace;
    out.converged = status != ImproperInputParameters && status != TooManyFunctionEvaluation &&
                    status != NotStarted && status != Running;
    return out;
}

}  // namespace starkzz
