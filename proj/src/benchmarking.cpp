#include "starkzz/benchmarking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "starkzz/errors.hpp"
#include "starkzz/least_squares.hpp"

namespace starkzz {

void DecayDataset::validate() const {
    if (lengths.size() != values.size()) {
        throw InvalidParameter("DecayDataset: lengths and values differ in size");
    }
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] < 0) throw InvalidParameter("DecayDataset: negative sequence length");
        if (i > 0 && lengths[i] <= lengths[i - 1]) {
            throw InvalidParameter("DecayDataset: lengths must be strictly increasing");
        }
        if (values[i].empty()) throw InvalidParameter("DecayDataset: length without samples");
        for (double v : values[i]) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InvalidParameter("DecayDataset: values must lie in [0, 1]");
            }
        }
    }
    if (shots && *shots < 1) throw InvalidParameter("DecayDataset: shots must be >= 1");
}

std::vector<double> DecayDataset::means() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        out.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
    }
    return out;
}

std::size_t DecayDataset::sample_count() const {
    std::size_t n = 0;
    for (const auto& v : values) n += v.size();
    return n;
}

namespace {

// Per-length standard errors of the mean. Returns an empty vector when no
// usable noise estimate exists (the caller then fits unweighted).
std::vector<double> length_sigmas(const DecayDataset& data, const std::vector<double>& mean) {
    const std::size_t n = mean.size();
    std::vector<double> sigma(n);
    if (data.shots) {
        const double s = *data.shots;
        const double lo = 0.5 / s;
        for (std::size_t i = 0; i < n; ++i) {
            const double q = std::clamp(mean[i], lo, 1.0 - lo);
            sigma[i] = std::sqrt(q * (1.0 - q) / (s * static_cast<double>(data.values[i].size())));
        }
        return sigma;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = data.values[i];
        if (v.size() < 2) return {};
        double ss = 0.0;
        for (double x : v) ss += (x - mean[i]) * (x - mean[i]);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        if (!(sd > 0.0)) return {};
        sigma[i] = sd / std::sqrt(static_cast<double>(v.size()));
    }
    return sigma;
}

struct WeightedData {
    std::vector<double> m;
    std::vector<double> y;
    std::vector<double> sigma;  // empty ⇒ unweighted
};

WeightedData prepare(const DecayDataset& data) {
    data.validate();
    if (data.lengths.size() < 3) {
        throw InsufficientData("decay fit needs at least 3 distinct sequence lengths");
    }
    WeightedData w;
    w.y = data.means();
    w.m.assign(data.lengths.begin(), data.lengths.end());
    w.sigma = length_sigmas(data, w.y);
    return w;
}

// Covariance of the parameters: unscaled for residuals normalized by known σ,
// otherwise scaled by the reduced residual variance.
Eigen::MatrixXd parameter_covariance(const LeastSquaresResult& fit, bool weighted) {
    Eigen::MatrixXd cov = fit.covariance();
    if (!weighted) {
        const auto dof = fit.residuals.size() - fit.params.size();
        cov *= dof > 0 ? fit.cost / static_cast<double>(dof) : 0.0;
    }
    return cov;
}

double safe_sqrt(double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }

}  // namespace

DecayFit fit_decay(const DecayDataset& data) {
    const WeightedData w = prepare(data);
    const std::size_t n = w.m.size();
    for (double y : w.y) {
        if (!(y > 0.0)) throw InvalidParameter("fit_decay: mean values must be positive");
    }
    const bool weighted = !w.sigma.empty();
    auto sig = [&](std::size_t i) { return weighted ? w.sigma[i] : 1.0; };

    // log P = log A + m log p
    std::vector<double> logy(n);
    for (std::size_t i = 0; i < n; ++i) logy[i] = std::log(w.y[i]);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        design(k, 0) = 1.0;
        design(k, 1) = w.m[i];
        rhs(k) = logy[i];
    }
    const Eigen::Vector2d c = design.colPivHouseholderQr().solve(rhs);
    Eigen::VectorXd x0(2);
    x0 << std::exp(c(0)), std::exp(c(1));

    const ResidualFunction residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            r(static_cast<Eigen::Index>(i)) = (x(0) * std::pow(x(1), w.m[i]) - w.y[i]) / sig(i);
        }
        return r;
    };
    LeastSquaresResult fit = levenberg_marquardt(residual, x0, static_cast<Eigen::Index>(n));
    if (!fit.params.allFinite() || !(fit.params(1) > 0.0)) {
        throw FitFailure("fit_decay: no finite decaying solution", fit.params);
    }

    DecayFit out;
    if (fit.params(1) > 1.0) {
        // Best p lies above 1: hold p = 1 and take A as the weighted mean.
        out.clamped = true;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wt = 1.0 / (sig(i) * sig(i));
            num += wt * w.y[i];
            den += wt;
        }
        Eigen::VectorXd x(2);
        x << num / den, 1.0;
        fit.params = x;
        fit.residuals = residual(x);
        fit.cost = fit.residuals.squaredNorm();
        LeastSquaresOptions opts;
        fit.jacobian = finite_difference_jacobian(residual, x, fit.residuals, opts);
    }
    const Eigen::MatrixXd cov = parameter_covariance(fit, weighted);
    out.a = fit.params(0);
    out.p = fit.params(1);
    out.sigma_a = safe_sqrt(cov(0, 0));
    out.sigma_p = safe_sqrt(cov(1, 1));
    out.chi_square = fit.cost;
    return out;
}

FidelityEstimate interleaved_fidelity(double p_ref, double p_int, int d) {
    if (d < 2) throw InvalidParameter("interleaved_fidelity: dimension must be >= 2");
    if (!(p_ref != 0.0) || !std::isfinite(p_ref) || !std::isfinite(p_int)) {
        throw InvalidParameter("interleaved_fidelity: p_ref must be finite and nonzero");
    }
    FidelityEstimate out;
    const double dd = d;
    out.fidelity = 1.0 - (dd - 1.0) / dd * (1.0 - p_int / p_ref);
    out.warning = !(p_int > 0.0 && p_int <= p_ref && p_ref <= 1.0);
    return out;
}

CbAnalysis cb_analyze(const std::map<std::string, double>& pauli_decays, int d) {
    if (d < 2) throw InvalidParameter("cb_analyze: dimension must be >= 2");
    if (pauli_decays.empty()) throw InvalidParameter("cb_analyze: no Pauli decays given");
    const double scale = 1.0 - 1.0 / (static_cast<double>(d) * d);
    CbAnalysis out;
    double sum = 0.0;
    for (const auto& [label, p] : pauli_decays) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw InvalidParameter("cb_analyze: decay for '" + label + "' outside (0, 1]");
        }
        out.error_rates[label] = (1.0 - p) * scale;
        sum += p;
    }
    out.mean_decay = sum / static_cast<double>(pauli_decays.size());
    out.process_infidelity = (1.0 - out.mean_decay) * scale;
    return out;
}

ErrorBudget ErrorBudget::from_infidelities(double e_f, double e_s) {
    if (!(e_f >= 0.0) || !(e_s >= 0.0)) {
        throw InvalidParameter("ErrorBudget: infidelities must be non-negative");
    }
    ErrorBudget b;
    b.e_f = e_f;
    if (e_s > e_f) {
        b.e_s = e_f;
        b.e_u = 0.0;
        b.floored = true;
    } else {
        b.e_s = e_s;
        b.e_u = e_f - e_s;
    }
    return b;
}

ErrorBudget xrb_decompose(double p_rb, double unitarity, int d) {
    if (d < 2) throw InvalidParameter("xrb_decompose: dimension must be >= 2");
    if (unitarity > 1.0) throw InvalidParameter("xrb_decompose: invalid unitarity (u > 1)");
    if (!(unitarity > 0.0)) throw InvalidParameter("xrb_decompose: unitarity must be positive");
    if (!(p_rb > 0.0 && p_rb <= 1.0)) throw InvalidParameter("xrb_decompose: p_rb outside (0, 1]");
    const double scale = 1.0 - 1.0 / (static_cast<double>(d) * d);
    return ErrorBudget::from_infidelities((1.0 - p_rb) * scale,
                                          (1.0 - std::sqrt(unitarity)) * scale);
}

LeakageFit lrb_fit(const DecayDataset& data) {
    const WeightedData w = prepare(data);
    const std::size_t n = w.m.size();
    const bool weighted = !w.sigma.empty();
    auto sig = [&](std::size_t i) { return weighted ? w.sigma[i] : 1.0; };

    // For fixed Γ the model is linear in (B, A); scan Γ on a log grid.
    const double m_max = std::max(w.m.back(), 1.0);
    const double m_min = std::max(w.m.front() > 0 ? w.m.front() : w.m[1], 1.0);
    auto linear_part = [&](double gamma, double& a, double& b) {
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            design(k, 0) = 1.0 / sig(i);
            design(k, 1) = -std::exp(-gamma * w.m[i]) / sig(i);
            rhs(k) = w.y[i] / sig(i);
        }
        const Eigen::Vector2d c = design.colPivHouseholderQr().solve(rhs);
        b = c(0);
        a = c(1);
        return (design * c - rhs).squaredNorm();
    };
    double best_cost = std::numeric_limits<double>::infinity();
    double g0 = 0.0, a0 = 0.0, b0 = 0.0;
    const int grid = 200;
    const double g_lo = 0.01 / m_max, g_hi = 10.0 / m_min;
    for (int k = 0; k < grid; ++k) {
        const double g = g_lo * std::pow(g_hi / g_lo, k / (grid - 1.0));
        double a = 0.0, b = 0.0;
        const double cost = linear_part(g, a, b);
        if (cost < best_cost) {
            best_cost = cost;
            g0 = g;
            a0 = a;
            b0 = b;
        }
    }

    const ResidualFunction residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            r(static_cast<Eigen::Index>(i)) =
                (x(1) - x(0) * std::exp(-x(2) * w.m[i]) - w.y[i]) / sig(i);
        }
        return r;
    };
    Eigen::VectorXd x0(3);
    x0 << a0, b0, g0;
    const LeastSquaresResult fit = levenberg_marquardt(residual, x0, static_cast<Eigen::Index>(n));
    if (!fit.params.allFinite()) throw FitFailure("lrb_fit: non-finite parameters", fit.params);
    const Eigen::MatrixXd cov = parameter_covariance(fit, weighted);

    LeakageFit out;
    out.a = fit.params(0);
    out.b = fit.params(1);
    out.gamma = fit.params(2);
    out.chi_square = fit.cost;
    const double sigma_a = safe_sqrt(cov(0, 0));
    const double a_floor = 1e-12 * std::max(1.0, std::abs(out.b));
    if (!(std::abs(out.a) > std::max(a_floor, 2.0 * sigma_a))) {
        throw ModelMismatch("lrb_fit: no resolvable transient; decay rate is unidentifiable");
    }
    if (out.b < 0.0) throw ModelMismatch("lrb_fit: fitted asymptote B is negative");
    if (!(out.gamma > 0.0)) throw ModelMismatch("lrb_fit: fitted rate Gamma is not positive");

    out.gamma_up = out.b * out.gamma;
    out.gamma_down = out.gamma - out.gamma_up;
    if (out.gamma_down < 0.0) throw ModelMismatch("lrb_fit: asymptote B exceeds 1");
    out.sigma_b = safe_sqrt(cov(1, 1));
    out.sigma_gamma = safe_sqrt(cov(2, 2));
    const Eigen::Vector3d g_up(0.0, out.gamma, out.b);
    const Eigen::Vector3d g_down(0.0, -out.gamma, 1.0 - out.b);
    out.sigma_up = safe_sqrt(g_up.dot(cov * g_up));
    out.sigma_down = safe_sqrt(g_down.dot(cov * g_down));
    return out;
}

LeakageRate leakage_per_gate(double gamma_up_interleaved, double gamma_up_reference) {
    if (!(gamma_up_interleaved >= 0.0) || !(gamma_up_reference >= 0.0)) {
        throw InvalidParameter("leakage_per_gate: rates must be non-negative");
    }
    const double diff = gamma_up_interleaved - gamma_up_reference;
    if (diff < 0.0) return {0.0, true};
    return {diff, false};
}

CoherenceLimit coherence_limit(double t1_c, double t2_c, double t1_t, double t2_t,
                               double gate_len, int d) {
    if (d < 2) throw InvalidParameter("coherence_limit: dimension must be >= 2");
    for (double t : {t1_c, t2_c, t1_t, t2_t}) {
        if (!(t > 0.0)) throw InvalidParameter("coherence_limit: coherence times must be positive");
    }
    if (!(gate_len >= 0.0) || !std::isfinite(gate_len)) {
        throw InvalidParameter("coherence_limit: gate length must be finite and non-negative");
    }
    // 1 − F_q = (1 − e^{−t/T2})/3 + (1 − e^{−t/T1})/6
    auto qubit_error = [gate_len](double t1, double t2) {
        return -std::expm1(-gate_len / t2) / 3.0 - std::expm1(-gate_len / t1) / 6.0;
    };
    const double x_c = qubit_error(t1_c, t2_c);
    const double x_t = qubit_error(t1_t, t2_t);
    CoherenceLimit out;
    const double dd = d;
    out.infidelity = (x_c + x_t - x_c * x_t) * (dd + 1.0) / dd;
    out.warning = t2_c > 2.0 * t1_c || t2_t > 2.0 * t1_t;
    return out;
}

double evaluate(const DecayModel& model, int m) {
    return std::visit(
        [m](const auto& mdl) -> double {
            using T = std::decay_t<decltype(mdl)>;
            if constexpr (std::is_same_v<T, ExponentialModel>) {
                return mdl.a * std::pow(mdl.p, m);
            } else {
                return mdl.b - mdl.a * std::exp(-mdl.gamma * m);
            }
        },
        model);
}

DecayDataset synth_decay(const DecayModel& model, const std::vector<int>& lengths,
                         std::optional<int> shots, std::uint64_t seed, int samples_per_length) {
    if (shots && *shots < 1) throw InvalidParameter("synth_decay: shots must be >= 1");
    if (samples_per_length < 1) throw InvalidParameter("synth_decay: samples_per_length must be >= 1");
    DecayDataset out;
    out.kind = std::holds_alternative<ExponentialModel>(model) ? DecayKind::rb
                                                                : DecayKind::leakage_pop;
    out.lengths = lengths;
    out.shots = shots;
    std::mt19937_64 rng(seed);
    for (int m : lengths) {
        const double p = std::clamp(evaluate(model, m), 0.0, 1.0);
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(samples_per_length));
        for (int s = 0; s < samples_per_length; ++s) {
            if (shots) {
                std::binomial_distribution<int> dist(*shots, p);
                row.push_back(static_cast<double>(dist(rng)) / *shots);
            } else {
                row.push_back(p);
            }
        }
        out.values.push_back(std::move(row));
    }
    out.validate();
    return out;
}

}  // namespace starkzz
