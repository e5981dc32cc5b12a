#ifndef CCVAR_MEASURE_HPP
#define CCVAR_MEASURE_HPP

// Copula-based conditional value at risk
//   CCVaR_beta = E[ sum_i lambda_i F_i^{-1}(U_i) | C(U) >= beta ]
// computed as a one-dimensional integral over the Kendall-weighted diagonal,
// plus the independence and comonotone special cases and a rejection oracle.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/math/special_functions/gamma.hpp>

#include "ccvar/error.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/kendall.hpp"
#include "ccvar/portfolio.hpp"
#include "ccvar/quadrature.hpp"
#include "ccvar/sampling.hpp"

namespace ccvar {

struct QuadConfig {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_subdivisions = 200;
    double singular_clip = 1e-10; // integrals stop at 1 - singular_clip
    double min_denominator = 1e-14; // DegenerateError below this 1 - K(beta)
    KendallConfig kendall{};

    void validate() const {
        if (!(abs_tol > 0.0 && rel_tol > 0.0 && max_subdivisions > 0 && singular_clip > 0.0 && singular_clip < 0.5 &&
              min_denominator > 0.0))
            throw ParameterError("QuadConfig: tolerances must be positive");
    }
    QuadTolerance tolerance() const { return {abs_tol, rel_tol, max_subdivisions}; }
};

enum class Method { quadrature, mc_oracle, closed_form };

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::mc_oracle: return "mc_oracle";
    case Method::closed_form: return "closed_form";
    }
    return "unknown";
}

struct RiskValue {
    double beta = 0.0;
    double value = 0.0;
    Method method = Method::quadrature;
    std::optional<double> std_error;
    bool stochastic = false;     // part of the value came from a Monte-Carlo fallback
    double abs_error = 0.0;      // quadrature error estimate of the numerator
    double clipped_mass = 0.0;   // rough size of the integral over (1 - clip, 1)
    std::size_t accepted = 0;    // MC oracle: samples inside the unfavorable set
};

namespace detail {

inline void check_beta(double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("beta must lie in [0, 1)");
}

/// int_a^{1-clip} g, throwing IntegrationError when the tolerance is not met.
/// The absolute tolerance applies to the final ratio, so it is scaled by `denom`.
template <class G>
QuadResult integrate_to_clip(G&& g, double a, const QuadConfig& cfg, const char* who, double denom = 1.0) {
    const double upper = 1.0 - cfg.singular_clip;
    if (!(a < upper)) return {0.0, 0.0, 0, true};
    auto tol = cfg.tolerance();
    tol.abs_tol *= std::min(1.0, denom);
    auto r = integrate(g, a, upper, tol);
    if (!std::isfinite(r.value))
        throw IntegrationError(std::string(who) + ": integrand is not finite on the integration range");
    if (!r.converged)
        throw IntegrationError(std::string(who) + ": tolerance not reached in " + std::to_string(r.intervals) +
                               " subintervals (error estimate " + std::to_string(r.abs_error) + ")");
    return r;
}

/// The weight lies in [0,1], so the dropped piece is about clip * |L(1 - clip)|.
inline double clip_estimate(const PortfolioSpec& port, const QuadConfig& cfg) {
    return cfg.singular_clip * std::abs(port.diagonal_loss(1.0 - cfg.singular_clip));
}

/// 1 - K(x) for the d-dimensional independence copula: -ln C is Gamma(d, 1), so this
/// is the regularized lower incomplete gamma P(d, -ln x).
inline double independence_kendall_survival(int d, double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(d), -std::log(x));
}

} // namespace detail

/// CCVaR by adaptive quadrature:
///   int_beta^1 L(t) phi'(t) h_{d-1}(t, beta) dt / (1 - K(beta)),  L(t) = sum_i lambda_i F_i^{-1}(t).
inline RiskValue ccvar_quadrature(const CopulaSpec& spec, const PortfolioSpec& port, double beta,
                                  const QuadConfig& cfg = {}) {
    detail::check_beta(beta);
    cfg.validate();
    port.validate();
    if (static_cast<int>(port.dim()) != spec.dim())
        throw DimensionError("ccvar_quadrature: copula dimension " + std::to_string(spec.dim()) +
                             " but portfolio has " + std::to_string(port.dim()) + " assets");
    RiskValue out;
    out.beta = beta;
    out.method = Method::quadrature;
    double denom = 1.0;
    if (beta > 0.0) {
        const auto k = kendall_survival(spec, beta, cfg.kendall);
        denom = k.value;
        out.stochastic = k.stochastic;
    }
    if (!(denom >= cfg.min_denominator)) throw DegenerateError("ccvar_quadrature: 1 - K(beta) is below the floor");
    const UnfavorableWeight w(spec, beta, cfg.kendall);
    out.stochastic = out.stochastic || w.stochastic();
    auto g = [&](double t) {
        const double wt = w(t);
        return wt == 0.0 ? 0.0 : port.diagonal_loss(t) * wt;
    };
    const auto r = detail::integrate_to_clip(g, beta, cfg, "ccvar_quadrature", denom);
    out.value = r.value / denom;
    out.abs_error = r.abs_error / denom;
    out.clipped_mass = detail::clip_estimate(port, cfg) / denom;
    return out;
}

/// Independence special case: weight 1 - K^{(d-1)}(beta / t), denominator 1 - K^{(d)}(beta).
inline RiskValue mcvar_independence(const PortfolioSpec& port, int d, double beta, const QuadConfig& cfg = {}) {
    detail::check_beta(beta);
    cfg.validate();
    port.validate();
    if (d < 2 || static_cast<std::size_t>(d) != port.dim())
        throw DimensionError("mcvar_independence: dimension must be >= 2 and match the portfolio");
    RiskValue out;
    out.beta = beta;
    out.method = Method::quadrature;
    const double denom = beta == 0.0 ? 1.0 : detail::independence_kendall_survival(d, beta);
    if (!(denom >= cfg.min_denominator)) throw DegenerateError("mcvar_independence: 1 - K(beta) is below the floor");
    auto g = [&](double t) {
        if (t <= beta) return 0.0;
        const double wt = beta == 0.0 ? 1.0 : detail::independence_kendall_survival(d - 1, beta / t);
        return wt == 0.0 ? 0.0 : port.diagonal_loss(t) * wt;
    };
    const auto r = detail::integrate_to_clip(g, beta, cfg, "mcvar_independence", denom);
    out.value = r.value / denom;
    out.abs_error = r.abs_error / denom;
    out.clipped_mass = detail::clip_estimate(port, cfg) / denom;
    return out;
}

/// Comonotone limit: (1/(1-beta)) int_beta^1 L(t) dt = sum_i lambda_i CVaR_beta(X_i).
inline RiskValue ccvar_comonotone(const PortfolioSpec& port, double beta, const QuadConfig& cfg = {}) {
    detail::check_beta(beta);
    cfg.validate();
    port.validate();
    RiskValue out;
    out.beta = beta;
    out.method = Method::closed_form;
    auto g = [&](double t) { return port.diagonal_loss(t); };
    const auto r = detail::integrate_to_clip(g, beta, cfg, "ccvar_comonotone");
    out.value = r.value / (1.0 - beta);
    out.abs_error = r.abs_error / (1.0 - beta);
    out.clipped_mass = detail::clip_estimate(port, cfg) / (1.0 - beta);
    return out;
}

/// Rejection oracle: mean loss over copula samples with C(u) >= beta.
inline RiskValue ccvar_mc_oracle(const CopulaSpec& spec, const PortfolioSpec& port, double beta, std::size_t n,
                                 std::uint64_t seed, unsigned threads = 0) {
    detail::check_beta(beta);
    port.validate();
    if (n < 10000) throw ParameterError("ccvar_mc_oracle: n must be >= 10^4");
    if (static_cast<int>(port.dim()) != spec.dim()) throw DimensionError("ccvar_mc_oracle: dimension mismatch");
    const auto panel = sample_copula(spec, n, seed, threads);
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        const auto u = panel.row(i);
        if (beta > 0.0 && copula_cdf(spec, u) < beta) continue;
        const double x = port.loss(u);
        ++k;
        const double delta = x - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (x - mean);
    }
    if (k < 100)
        throw InsufficientSamplesError("ccvar_mc_oracle: only " + std::to_string(k) +
                                       " samples in the unfavorable set (need 100)");
    RiskValue out;
    out.beta = beta;
    out.value = mean;
    out.method = Method::mc_oracle;
    out.std_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
    out.stochastic = true;
    out.accepted = k;
    return out;
}

} // namespace ccvar

#endif
