#ifndef CCVAR_GARCH_HPP
#define CCVAR_GARCH_HPP

// ARMA(p,q)-GARCH(r,s) margins:
//   X_t = a_0 + sum_i a_i X_{t-i} + eps_t + sum_j b_j eps_{t-j},  eps_t = sigma_t z_t
//   sigma_t^2 = c_0 + sum_i c_i eps_{t-i}^2 + sum_j d_j sigma_{t-j}^2
// with quasi-maximum-likelihood fitting, PIT and one-step quantile forecasts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccvar/error.hpp"
#include "ccvar/innovations.hpp"
#include "ccvar/keyvalue.hpp"
#include "ccvar/optimize.hpp"
#include "ccvar/random.hpp"

namespace ccvar {

using ReturnSeries = std::vector<double>;

struct GarchOrder {
    int p = 1; // AR lags
    int q = 0; // MA lags
    int r = 1; // ARCH lags
    int s = 1; // GARCH lags

    int presample() const { return p; }
    void validate() const {
        if (p < 0 || q < 0 || r < 1 || s < 0) throw ParameterError("GarchOrder: need p, q, s >= 0 and r >= 1");
    }
};

/// Filtered quantities needed for the next forecast.
struct GarchState {
    std::vector<double> x;      // last p observations, most recent first
    std::vector<double> eps;    // last max(q, r) residuals, most recent first
    std::vector<double> sigma2; // last s variances, most recent first
};

struct MarginModel {
    GarchOrder order{};
    std::vector<double> ar{0.0, 0.0};     // a_0 .. a_p
    std::vector<double> ma;               // b_1 .. b_q
    std::vector<double> arch{1.0, 0.0};   // c_0 .. c_r
    std::vector<double> garch{0.0};       // d_1 .. d_s
    Innovation innovation{};

    // fit report
    std::vector<double> std_errors;       // aligned with parameter_names()
    double loglik = std::numeric_limits<double>::quiet_NaN();
    double aic = std::numeric_limits<double>::quiet_NaN();
    std::size_t nobs = 0;

    std::optional<GarchState> state;

    /// AR(1)-GARCH(1,1).
    static MarginModel ar1_garch11(double a0, double a1, double c0, double c1, double d1, Innovation innov = {}) {
        MarginModel m;
        m.ar = {a0, a1};
        m.arch = {c0, c1};
        m.garch = {d1};
        m.innovation = innov;
        m.validate();
        return m;
    }

    double a0() const { return ar[0]; }
    double a1() const { return order.p >= 1 ? ar[1] : 0.0; }
    double c0() const { return arch[0]; }
    double c1() const { return order.r >= 1 ? arch[1] : 0.0; }
    double d1() const { return order.s >= 1 ? garch[0] : 0.0; }

    double persistence() const {
        double p = 0.0;
        for (int i = 1; i <= order.r; ++i) p += arch[i];
        for (double d : garch) p += d;
        return p;
    }

    double unconditional_variance() const { return arch[0] / (1.0 - persistence()); }

    void validate() const {
        order.validate();
        if (static_cast<int>(ar.size()) != order.p + 1 || static_cast<int>(ma.size()) != order.q ||
            static_cast<int>(arch.size()) != order.r + 1 || static_cast<int>(garch.size()) != order.s)
            throw DimensionError("MarginModel: coefficient counts do not match the order");
        if (!(arch[0] > 0.0)) throw ParameterError("MarginModel: c0 must be > 0");
        for (int i = 1; i <= order.r; ++i)
            if (!(arch[i] >= 0.0)) throw ParameterError("MarginModel: ARCH coefficients must be >= 0");
        for (double d : garch)
            if (!(d >= 0.0)) throw ParameterError("MarginModel: GARCH coefficients must be >= 0");
        if (!(persistence() < 1.0)) throw StationarityError("MarginModel: sum of ARCH and GARCH coefficients must be < 1");
        innovation.validate();
    }

    std::vector<std::string> parameter_names() const {
        std::vector<std::string> n;
        for (int i = 0; i <= order.p; ++i) n.push_back("a" + std::to_string(i));
        for (int j = 1; j <= order.q; ++j) n.push_back("b" + std::to_string(j));
        for (int i = 0; i <= order.r; ++i) n.push_back("c" + std::to_string(i));
        for (int j = 1; j <= order.s; ++j) n.push_back("d" + std::to_string(j));
        if (innovation.shape_count() >= 1) n.push_back("nu");
        if (innovation.shape_count() >= 2) n.push_back("skew");
        return n;
    }

    std::vector<double> parameters() const {
        std::vector<double> v(ar);
        v.insert(v.end(), ma.begin(), ma.end());
        v.insert(v.end(), arch.begin(), arch.end());
        v.insert(v.end(), garch.begin(), garch.end());
        if (innovation.shape_count() >= 1) v.push_back(innovation.nu());
        if (innovation.shape_count() >= 2) v.push_back(innovation.skew());
        return v;
    }
};

namespace detail {

struct Filtered {
    std::vector<double> eps;
    std::vector<double> sigma2;
    double loglik = 0.0;
};

/// Residual and variance recursion. Pre-sample residuals are zero in the mean
/// equation; pre-sample eps^2 and sigma^2 equal the mean squared residual.
inline Filtered garch_filter(const MarginModel& m, const ReturnSeries& x, bool want_loglik) {
    const int p = m.order.p, q = m.order.q, r = m.order.r, s = m.order.s;
    const std::size_t T = x.size();
    const std::size_t t0 = static_cast<std::size_t>(p);
    if (T <= t0 + 1) throw StateError("garch filter: series too short to initialize the recursion");
    Filtered f;
    f.eps.assign(T, 0.0);
    f.sigma2.assign(T, 0.0);
    double ss = 0.0;
    for (std::size_t t = t0; t < T; ++t) {
        double mu = m.ar[0];
        for (int i = 1; i <= p; ++i) mu += m.ar[i] * x[t - i];
        for (int j = 1; j <= q; ++j)
            if (t >= t0 + j) mu += m.ma[j - 1] * f.eps[t - j];
        f.eps[t] = x[t] - mu;
        ss += f.eps[t] * f.eps[t];
    }
    const double v = ss / static_cast<double>(T - t0);
    for (std::size_t t = t0; t < T; ++t) {
        double s2 = m.arch[0];
        for (int i = 1; i <= r; ++i) s2 += m.arch[i] * (t >= t0 + i ? f.eps[t - i] * f.eps[t - i] : v);
        for (int j = 1; j <= s; ++j) s2 += m.garch[j - 1] * (t >= t0 + j ? f.sigma2[t - j] : v);
        f.sigma2[t] = s2;
    }
    if (want_loglik) {
        double ll = 0.0;
        for (std::size_t t = t0; t < T; ++t) {
            const double sd = std::sqrt(f.sigma2[t]);
            ll += m.innovation.log_pdf(f.eps[t] / sd) - std::log(sd);
        }
        f.loglik = ll;
    }
    return f;
}

inline GarchState make_state(const MarginModel& m, const ReturnSeries& x, const Filtered& f) {
    GarchState st;
    const std::size_t T = x.size();
    for (int i = 0; i < m.order.p; ++i) st.x.push_back(x[T - 1 - i]);
    for (int i = 0; i < std::max(m.order.q, m.order.r); ++i) st.eps.push_back(f.eps[T - 1 - i]);
    for (int i = 0; i < m.order.s; ++i) st.sigma2.push_back(f.sigma2[T - 1 - i]);
    return st;
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Maps the unconstrained vector eta onto model coefficients:
/// c_0 = exp, persistence = logistic, split of the persistence by softmax,
/// nu = 2 + exp, skew = exp.
struct GarchTransform {
    GarchOrder order;
    InnovationKind kind;

    int size() const {
        const int shapes = kind == InnovationKind::Normal ? 0 : (kind == InnovationKind::StudentT ? 1 : 2);
        return order.p + 1 + order.q + 1 + order.r + order.s + shapes;
    }

    MarginModel to_model(std::span<const double> eta) const {
        MarginModel m;
        m.order = order;
        std::size_t k = 0;
        m.ar.assign(eta.begin(), eta.begin() + order.p + 1);
        k += order.p + 1;
        m.ma.assign(eta.begin() + k, eta.begin() + k + order.q);
        k += order.q;
        const int nv = order.r + order.s;
        m.arch.assign(order.r + 1, 0.0);
        m.garch.assign(order.s, 0.0);
        m.arch[0] = std::exp(eta[k++]);
        const double pers = logistic(eta[k++]);
        std::vector<double> w(nv, 0.0);
        double mx = 0.0;
        for (int i = 0; i < nv - 1; ++i) mx = std::max(mx, eta[k + i]);
        double sum = 0.0;
        for (int i = 0; i < nv; ++i) {
            w[i] = std::exp((i < nv - 1 ? eta[k + i] : 0.0) - mx);
            sum += w[i];
        }
        k += nv - 1;
        for (int i = 0; i < order.r; ++i) m.arch[i + 1] = pers * w[i] / sum;
        for (int j = 0; j < order.s; ++j) m.garch[j] = pers * w[order.r + j] / sum;
        if (kind == InnovationKind::Normal)
            m.innovation = Innovation::normal();
        else if (kind == InnovationKind::StudentT)
            m.innovation = Innovation::student_t(2.0 + std::exp(eta[k++]));
        else {
            const double nu = 2.0 + std::exp(eta[k++]);
            m.innovation = Innovation::skewed_t(nu, std::exp(eta[k++]));
        }
        return m;
    }

    std::vector<double> to_eta(const MarginModel& m) const {
        std::vector<double> eta(m.ar);
        eta.insert(eta.end(), m.ma.begin(), m.ma.end());
        eta.push_back(std::log(m.arch[0]));
        const double pers = std::clamp(m.persistence(), 1e-6, 1.0 - 1e-6);
        eta.push_back(logit(pers));
        const int nv = order.r + order.s;
        std::vector<double> parts;
        for (int i = 1; i <= order.r; ++i) parts.push_back(std::max(m.arch[i], 1e-8 * pers));
        for (int j = 0; j < order.s; ++j) parts.push_back(std::max(m.garch[j], 1e-8 * pers));
        for (int i = 0; i < nv - 1; ++i) eta.push_back(std::log(parts[i] / parts[nv - 1]));
        if (kind != InnovationKind::Normal) eta.push_back(std::log(std::max(m.innovation.nu() - 2.0, 1e-6)));
        if (kind == InnovationKind::SkewedT) eta.push_back(std::log(m.innovation.skew()));
        return eta;
    }
};

/// OLS of x_t on (1, x_{t-1}, ..., x_{t-p}).
inline std::vector<double> ar_ols(const ReturnSeries& x, int p) {
    const std::size_t T = x.size();
    const std::size_t n = T - static_cast<std::size_t>(p);
    Eigen::MatrixXd A(n, p + 1);
    Eigen::VectorXd y(n);
    for (std::size_t t = static_cast<std::size_t>(p); t < T; ++t) {
        const auto row = t - p;
        A(row, 0) = 1.0;
        for (int i = 1; i <= p; ++i) A(row, i) = x[t - i];
        y(row) = x[t];
    }
    const Eigen::VectorXd b = A.colPivHouseholderQr().solve(y);
    return {b.data(), b.data() + b.size()};
}

} // namespace detail

struct GarchFitOptions {
    GarchOrder order{};
    bool standard_errors = true;
    const MarginModel* warm_start = nullptr; // previous fit reused as the starting point
    int max_iter = 400;
};

/// Filters the series through the model and stores the final state for forecasting.
inline void update_state(MarginModel& m, const ReturnSeries& x) {
    const auto f = detail::garch_filter(m, x, true);
    m.state = detail::make_state(m, x, f);
    m.loglik = f.loglik;
    m.nobs = x.size() - m.order.presample();
}

/// Quasi-maximum-likelihood fit; bounds are enforced by reparameterization.
inline MarginModel fit_ar_garch(const ReturnSeries& x, InnovationKind kind, const GarchFitOptions& opt = {}) {
    opt.order.validate();
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("fit_ar_garch: series contains non-finite values");
    if (x.size() < 250) throw InsufficientSamplesError("fit_ar_garch: need at least 250 observations");
    const detail::GarchTransform tr{opt.order, kind};
    const double n = static_cast<double>(x.size() - opt.order.presample());

    auto negll = [&](std::span<const double> eta) {
        const auto m = tr.to_model(eta);
        return -detail::garch_filter(m, x, true).loglik / n;
    };

    // start: OLS mean equation, variance targeting over a small persistence grid
    std::vector<double> start;
    double start_val = std::numeric_limits<double>::infinity();
    auto consider = [&](const MarginModel& m) {
        const auto eta = tr.to_eta(m);
        const double v = negll(eta);
        if (v < start_val) {
            start_val = v;
            start = eta;
        }
    };
    if (opt.warm_start && opt.warm_start->order.p == opt.order.p && opt.warm_start->order.q == opt.order.q &&
        opt.warm_start->order.r == opt.order.r && opt.warm_start->order.s == opt.order.s &&
        opt.warm_start->innovation.kind() == kind) {
        consider(*opt.warm_start);
    } else {
        MarginModel m;
        m.order = opt.order;
        m.ar = detail::ar_ols(x, opt.order.p);
        m.ma.assign(opt.order.q, 0.0);
        double var = 0.0;
        {
            MarginModel tmp = m;
            tmp.arch.assign(opt.order.r + 1, 0.0);
            tmp.arch[0] = 1.0;
            tmp.garch.assign(opt.order.s, 0.0);
            const auto f = detail::garch_filter(tmp, x, false);
            for (std::size_t t = opt.order.presample(); t < x.size(); ++t) var += f.eps[t] * f.eps[t];
            var /= n;
        }
        for (double pers : {0.3, 0.8, 0.95, 0.99}) {
            m.arch.assign(opt.order.r + 1, 0.0);
            m.garch.assign(opt.order.s, 0.0);
            m.arch[0] = var * (1.0 - pers);
            const double arch_share = opt.order.s > 0 ? 0.1 : 1.0;
            for (int i = 1; i <= opt.order.r; ++i) m.arch[i] = pers * arch_share / opt.order.r;
            for (int j = 0; j < opt.order.s; ++j) m.garch[j] = pers * (1.0 - arch_share) / opt.order.s;
            if (kind == InnovationKind::Normal)
                m.innovation = Innovation::normal();
            else if (kind == InnovationKind::StudentT)
                m.innovation = Innovation::student_t(8.0);
            else
                m.innovation = Innovation::skewed_t(8.0, 1.0);
            consider(m);
        }
    }
    if (!std::isfinite(start_val)) throw ConvergenceError("fit_ar_garch: log-likelihood not finite at start", start);

    BfgsOptions bo;
    bo.max_iter = opt.max_iter;
    bo.grad_tol = 1e-7;
    auto best = minimize_bfgs(negll, start, bo);
    if (!(best.fx <= start_val)) {
        best.x = start;
        best.fx = start_val;
    }
    SimplexOptions so;
    so.initial_step = 0.02;
    so.size_tol = 1e-7;
    const auto polish = minimize_simplex(negll, best.x, so);
    if (polish.fx < best.fx) best = polish;
    if (!std::isfinite(best.fx)) throw ConvergenceError("fit_ar_garch: optimizer diverged", tr.to_model(best.x).parameters());

    MarginModel m = tr.to_model(best.x);
    m.order = opt.order;
    if (!(m.persistence() < 1.0 - 1e-8))
        throw StationarityError("fit_ar_garch: optimum sits on the stationarity boundary (persistence " +
                                std::to_string(m.persistence()) + ")");
    update_state(m, x);
    const int k = tr.size();
    m.aic = 2.0 * k - 2.0 * m.loglik;

    if (opt.standard_errors) {
        // delta method: Cov(params) = J H^{-1} J^T, H the Hessian of -loglik in eta
        auto total = [&](std::span<const double> eta) { return n * negll(eta); };
        const Eigen::MatrixXd H = numeric_hessian(total, best.x, 1e-4);
        const Eigen::MatrixXd cov_eta = H.completeOrthogonalDecomposition().pseudoInverse();
        Eigen::MatrixXd J(k, k);
        std::vector<double> e = best.x;
        for (int j = 0; j < k; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(e[j]));
            e[j] = best.x[j] + h;
            const auto up = tr.to_model(e).parameters();
            e[j] = best.x[j] - h;
            const auto dn = tr.to_model(e).parameters();
            e[j] = best.x[j];
            for (int i = 0; i < k; ++i) J(i, j) = (up[i] - dn[i]) / (2.0 * h);
        }
        const Eigen::MatrixXd cov = J * cov_eta * J.transpose();
        m.std_errors.resize(k);
        for (int i = 0; i < k; ++i) m.std_errors[i] = cov(i, i) > 0.0 ? std::sqrt(cov(i, i)) : std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

inline constexpr std::size_t kGarchBurnIn = 1000;

/// Runs the recursion on the given standardized innovations and keeps the last
/// z.size() - kGarchBurnIn observations.
inline ReturnSeries simulate_garch_from(const MarginModel& m, const std::vector<double>& z) {
    m.validate();
    if (z.size() <= kGarchBurnIn) throw ParameterError("simulate_garch: need more innovations than the burn-in");
    const int p = m.order.p, q = m.order.q, r = m.order.r, s = m.order.s;
    const std::size_t lag = static_cast<std::size_t>(std::max({p, q, r, s, 1}));
    const std::size_t total = z.size() + lag;
    double ar_sum = 0.0;
    for (int i = 1; i <= p; ++i) ar_sum += m.ar[i];
    const double x_mean = std::abs(ar_sum) < 1.0 ? m.ar[0] / (1.0 - ar_sum) : m.ar[0];
    std::vector<double> x(total, x_mean), eps(total, 0.0), s2(total, m.unconditional_variance());
    for (std::size_t t = lag; t < total; ++t) {
        double v = m.arch[0];
        for (int i = 1; i <= r; ++i) v += m.arch[i] * eps[t - i] * eps[t - i];
        for (int j = 1; j <= s; ++j) v += m.garch[j - 1] * s2[t - j];
        s2[t] = v;
        eps[t] = std::sqrt(v) * z[t - lag];
        double mu = m.ar[0];
        for (int i = 1; i <= p; ++i) mu += m.ar[i] * x[t - i];
        for (int j = 1; j <= q; ++j) mu += m.ma[j - 1] * eps[t - j];
        x[t] = mu + eps[t];
    }
    return ReturnSeries(x.begin() + static_cast<std::ptrdiff_t>(lag + kGarchBurnIn), x.end());
}

/// Simulates n observations after discarding a burn-in of 1000 steps.
inline ReturnSeries simulate_garch(const MarginModel& m, std::size_t n, std::uint64_t seed) {
    m.validate();
    Engine rng = make_stream(seed, 0);
    std::vector<double> z(n + kGarchBurnIn);
    for (auto& v : z) v = m.innovation.sample(rng);
    return simulate_garch_from(m, z);
}

/// Standardized residuals z_t = eps_t / sigma_t for t >= p.
inline std::vector<double> standardized_residuals(const MarginModel& m, const ReturnSeries& x) {
    const auto f = detail::garch_filter(m, x, false);
    std::vector<double> z;
    z.reserve(x.size());
    for (std::size_t t = m.order.presample(); t < x.size(); ++t) z.push_back(f.eps[t] / std::sqrt(f.sigma2[t]));
    return z;
}

/// u_t = F_z(z_t), clamped strictly inside (0, 1); length T - p.
inline std::vector<double> pit_transform(const MarginModel& m, const ReturnSeries& x) {
    auto z = standardized_residuals(m, x);
    const double lo = 1e-15, hi = 1.0 - 1e-15;
    for (auto& v : z) v = std::clamp(m.innovation.cdf(v), lo, hi);
    return z;
}

/// One-step conditional mean and variance from the stored state.
inline std::pair<double, double> forecast_moments(const MarginModel& m) {
    if (!m.state) throw StateError("forecast: model carries no filtered state");
    const auto& st = *m.state;
    double mu = m.ar[0];
    for (int i = 1; i <= m.order.p; ++i) mu += m.ar[i] * st.x.at(i - 1);
    for (int j = 1; j <= m.order.q; ++j) mu += m.ma[j - 1] * st.eps.at(j - 1);
    double v = m.arch[0];
    for (int i = 1; i <= m.order.r; ++i) v += m.arch[i] * st.eps.at(i - 1) * st.eps.at(i - 1);
    for (int j = 1; j <= m.order.s; ++j) v += m.garch[j - 1] * st.sigma2.at(j - 1);
    return {mu, v};
}

/// mu_{T+1} + sigma_{T+1} F_z^{-1}(p).
inline double quantile_forecast(const MarginModel& m, double p) {
    const auto [mu, v] = forecast_moments(m);
    return mu + std::sqrt(v) * m.innovation.quantile(p);
}

// ---------------------------------------------------------------------------
// key-value serialization

inline void write_model(const MarginModel& m, KeyValue& kv, const std::string& prefix = "") {
    kv.set(prefix + "innovation", std::string(to_string(m.innovation.kind())));
    kv.set(prefix + "order", std::to_string(m.order.p) + "," + std::to_string(m.order.q) + "," +
                                 std::to_string(m.order.r) + "," + std::to_string(m.order.s));
    const auto names = m.parameter_names();
    const auto vals = m.parameters();
    for (std::size_t i = 0; i < names.size(); ++i) kv.set(prefix + names[i], vals[i]);
    for (std::size_t i = 0; i < m.std_errors.size() && i < names.size(); ++i)
        kv.set(prefix + "se_" + names[i], m.std_errors[i]);
    kv.set(prefix + "loglik", m.loglik);
    kv.set(prefix + "aic", m.aic);
    kv.set(prefix + "nobs", m.nobs);
    if (m.state) {
        auto put = [&](const std::string& key, const std::vector<double>& v) {
            for (std::size_t i = 0; i < v.size(); ++i) kv.set(prefix + key + std::to_string(i + 1), v[i]);
        };
        put("state_x", m.state->x);
        put("state_eps", m.state->eps);
        put("state_sigma2_", m.state->sigma2);
    }
}

inline MarginModel read_model(const KeyValue& kv, const std::string& prefix = "") {
    MarginModel m;
    const auto order = kv.get(prefix + "order");
    if (std::sscanf(order.c_str(), "%d,%d,%d,%d", &m.order.p, &m.order.q, &m.order.r, &m.order.s) != 4)
        throw ParseError("model: malformed order '" + order + "'");
    const auto kind = parse_innovation(kv.get(prefix + "innovation"));
    auto g = [&](const std::string& k) { return kv.get_double(prefix + k); };
    m.ar.resize(m.order.p + 1);
    for (int i = 0; i <= m.order.p; ++i) m.ar[i] = g("a" + std::to_string(i));
    m.ma.resize(m.order.q);
    for (int j = 1; j <= m.order.q; ++j) m.ma[j - 1] = g("b" + std::to_string(j));
    m.arch.resize(m.order.r + 1);
    for (int i = 0; i <= m.order.r; ++i) m.arch[i] = g("c" + std::to_string(i));
    m.garch.resize(m.order.s);
    for (int j = 1; j <= m.order.s; ++j) m.garch[j - 1] = g("d" + std::to_string(j));
    if (kind == InnovationKind::Normal)
        m.innovation = Innovation::normal();
    else if (kind == InnovationKind::StudentT)
        m.innovation = Innovation::student_t(g("nu"));
    else
        m.innovation = Innovation::skewed_t(g("nu"), g("skew"));
    for (const auto& name : m.parameter_names())
        if (kv.has(prefix + "se_" + name)) m.std_errors.push_back(g("se_" + name));
    m.loglik = kv.get_double_or(prefix + "loglik", m.loglik);
    m.aic = kv.get_double_or(prefix + "aic", m.aic);
    m.nobs = static_cast<std::size_t>(kv.get_double_or(prefix + "nobs", 0.0));
    if (kv.has(prefix + "state_sigma2_1") || kv.has(prefix + "state_x1")) {
        GarchState st;
        for (int i = 1; i <= m.order.p; ++i) st.x.push_back(g("state_x" + std::to_string(i)));
        for (int i = 1; i <= std::max(m.order.q, m.order.r); ++i) st.eps.push_back(g("state_eps" + std::to_string(i)));
        for (int i = 1; i <= m.order.s; ++i) st.sigma2.push_back(g("state_sigma2_" + std::to_string(i)));
        m.state = st;
    }
    m.validate();
    return m;
}

} // namespace ccvar

#endif
