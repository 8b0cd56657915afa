#include "starkzz/crosstalk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "starkzz/least_squares.hpp"
#include "starkzz/spectrum.hpp"

namespace starkzz {

using std::numbers::pi;

double wrap_phase(double phi) {
    double w = std::remainder(phi, 2.0 * pi);
    if (w <= -pi) {
        w += 2.0 * pi;
    }
    return w;
}

DenseMatrix<cplx> CrosstalkMatrix::matrix() const {
    DenseMatrix<cplx> m(2, 2);
    m << std::polar(1.0, theta_c), c_ct * std::polar(1.0, phi_ct),
         c_tc * std::polar(1.0, phi_tc), cplx(1.0, 0.0);
    return m;
}

CrosstalkMatrix CrosstalkMatrix::canonical() const {
    CrosstalkMatrix out = *this;
    if (out.c_ct < 0.0) {
        out.c_ct = -out.c_ct;
        out.phi_ct += pi;
    }
    if (out.c_tc < 0.0) {
        out.c_tc = -out.c_tc;
        out.phi_tc += pi;
    }
    out.phi_ct = wrap_phase(out.phi_ct);
    out.phi_tc = wrap_phase(out.phi_tc);
    out.theta_c = wrap_phase(out.theta_c);
    return out;
}

std::pair<cplx, cplx> apply_crosstalk(const CrosstalkMatrix& xt, double a_c, double a_t,
                                      double phi_d, double scale) {
    const cplx line_c(a_c, 0.0);
    const cplx line_t = a_t * std::polar(1.0, -phi_d);
    const cplx eps_c = std::polar(1.0, xt.theta_c) * line_c + xt.c_ct * std::polar(1.0, xt.phi_ct) * line_t;
    const cplx eps_t = xt.c_tc * std::polar(1.0, xt.phi_tc) * line_c + line_t;
    return {scale * eps_c, scale * eps_t};
}

double model_zeta(const SystemParams& sys, double drive_freq, const CrosstalkModel& model,
                  const ZZSweepPoint& point) {
    const auto [eps_c, eps_t] = apply_crosstalk(model, point.a_c, point.a_t, point.phi_d);
    return zz_rate(sys, DriveConfig{drive_freq, eps_c, eps_t});
}

namespace {

Eigen::VectorXd pack(const CrosstalkModel& m) {
    Eigen::VectorXd x(6);
    x << m.xt.c_ct, m.xt.phi_ct, m.xt.c_tc, m.xt.phi_tc, m.xt.theta_c, m.scale;
    return x;
}

CrosstalkModel unpack(const Eigen::VectorXd& x) {
    return {CrosstalkMatrix{x(0), x(1), x(2), x(3), x(4)}, x(5)};
}

void check_coverage(const std::vector<ZZSweepPoint>& data) {
    if (data.size() < 12) {
        throw InsufficientData("fit_crosstalk: need at least 12 sweep points");
    }
    double lo = data.front().phi_d;
    double hi = lo;
    std::set<std::pair<double, double>> amplitudes;
    for (const auto& p : data) {
        if (!(p.zeta_uncertainty > 0.0)) {
            throw InvalidParameter("fit_crosstalk: every point needs a positive uncertainty");
        }
        lo = std::min(lo, p.phi_d);
        hi = std::max(hi, p.phi_d);
        amplitudes.insert({p.a_c, p.a_t});
    }
    if (hi - lo < pi) {
        throw InsufficientData("fit_crosstalk: drive phases must span at least half a period");
    }
    if (amplitudes.size() < 2) {
        throw InsufficientData("fit_crosstalk: need at least two distinct drive amplitudes");
    }
}

}  // namespace

CrosstalkFitResult fit_crosstalk(const std::vector<ZZSweepPoint>& data, const SystemParams& sys,
                                 double drive_freq, const CrosstalkModel& initial,
                                 const CrosstalkFitOptions& opts) {
    sys.validate();
    check_coverage(data);
    if (!(initial.scale > 0.0)) {
        throw InvalidParameter("fit_crosstalk: initial scale must be positive");
    }

    const auto n = static_cast<Eigen::Index>(data.size());
    const ResidualFunction residuals = [&](const Eigen::VectorXd& x) {
        const CrosstalkModel m = unpack(x);
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& p = data[static_cast<std::size_t>(i)];
            r(i) = (model_zeta(sys, drive_freq, m, p) - p.zeta_measured) / p.zeta_uncertainty;
        }
        return r;
    };

    LeastSquaresOptions lso;
    lso.max_evaluations = opts.max_evaluations;

    LeastSquaresResult best;
    bool have_best = false;
    int evaluations = 0;
    const int restarts = std::max(1, opts.restarts);
    for (int k = 0; k < restarts; ++k) {
        CrosstalkModel start = initial;
        const double shift = 2.0 * pi * k / restarts;
        start.xt.phi_ct = wrap_phase(start.xt.phi_ct + shift);
        start.xt.phi_tc = wrap_phase(start.xt.phi_tc + shift);
        start.xt.theta_c = wrap_phase(start.xt.theta_c + shift);
        LeastSquaresResult r;
        try {
            r = levenberg_marquardt(residuals, pack(start), n, lso);
        } catch (const LabelingFailure&) {
            continue;  // this start wandered into an unlabelable region
        }
        evaluations += r.evaluations;
        if (!have_best || r.cost < best.cost) {
            best = std::move(r);
            have_best = true;
        }
    }
    if (!have_best) {
        throw FitFailure("fit_crosstalk: every initialization failed", pack(initial));
    }
    if (!best.converged) {
        throw FitFailure("fit_crosstalk: optimizer did not converge", best.params);
    }

    CrosstalkFitResult out;
    out.model = unpack(best.params);
    out.model.xt = out.model.xt.canonical();
    const Eigen::MatrixXd cov = best.covariance();
    for (int i = 0; i < 6; ++i) {
        out.uncertainty[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, cov(i, i)));
    }
    out.chi_square = best.cost;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = data[static_cast<std::size_t>(i)].zeta_uncertainty;
        ss += std::pow(best.residuals(i) * s, 2);
    }
    out.residual_ss = ss;
    out.evaluations = evaluations;
    out.converged = true;
    return out;
}

}  // namespace starkzz
