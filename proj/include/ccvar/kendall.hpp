#ifndef CCVAR_KENDALL_HPP
#define CCVAR_KENDALL_HPP

// Kendall distribution K(t) = P(C(U) <= t), its density, and the weight of the
// CCVaR integral.
//
// Writing (-1)^i f_{i-1}(t) = |psi^{(i)}(phi(t))|, every term of
//   K(t) = t + sum_{i=1}^{d-1} phi(t)^i / i! |psi^{(i)}(phi(t))|
// is non-negative, so K is summed term by term in log-space.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "ccvar/error.hpp"
#include "ccvar/frailty.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/special_functions.hpp"

namespace ccvar {

/// Largest t used in place of values closer to 1.
inline constexpr double kKendallClamp = 1.0 - 1e-12;

struct KendallConfig {
    std::size_t mc_samples = 100000; // frailty draws when a closed form leaves double range
    std::uint64_t seed = 20240917;
};

struct KendallValue {
    double value = 0.0;
    bool stochastic = false;
};

namespace detail {

inline void check_kendall_arg(double t) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("kendall: t must lie in (0, 1)");
}

/// log|psi^{(n)}(phi(t))| for n = 0..d, falling back to the frailty estimator when a
/// closed form is not finite. Returns true when any value is stochastic.
inline bool log_abs_derivatives(const CopulaSpec& spec, double t, double log_s, std::span<double> out,
                                const KendallConfig* cfg) {
    const double s = std::exp(log_s);
    bool stochastic = false;
    for (std::size_t n = 1; n < out.size(); ++n) {
        double l = spec.log_abs_psi_derivative(static_cast<int>(n), s, log_s);
        if (!std::isfinite(l)) {
            if (!cfg || !(s > 0.0))
                throw OverflowError("kendall: |psi^(" + std::to_string(n) + ")| at t=" + std::to_string(t) +
                                    " is not representable");
            const auto est = f_aux_mc_estimate(spec, static_cast<int>(n) - 1, s, cfg->mc_samples, cfg->seed + n);
            l = std::log(std::abs(est.value));
            stochastic = true;
        }
        out[n] = l;
    }
    return stochastic;
}

inline KendallValue kendall_cdf_impl(const CopulaSpec& spec, double t, const KendallConfig* cfg) {
    check_kendall_arg(t);
    t = std::min(t, kKendallClamp);
    const int d = spec.dim();
    const double log_s = log_phi(spec, t);
    std::array<double, kMaxDim + 1> lpsi{};
    const bool stochastic = log_abs_derivatives(spec, t, log_s, std::span<double>(lpsi.data(), d), cfg);
    CompensatedSum acc;
    acc.add(t);
    for (int i = 1; i <= d - 1; ++i) acc.add(std::exp(i * log_s - std::lgamma(i + 1.0) + lpsi[i]));
    return {std::clamp(acc.value(), t, 1.0), stochastic};
}

/// Below this level the closed forms of 1 - K and of the weight lose digits to
/// cancellation and are replaced by their integral remainders.
inline constexpr double kCancellationLevel = 1e-5;

/// int_{-inf}^{u_hi} exp(lf(u)) du for an integrand decaying at least like e^u as
/// u -> -inf; the range is cut `width` below u_hi. Relative tolerance only.
template <class F>
double integrate_log_integrand(F&& lf, double u_hi, double width) {
    const double ref = lf(u_hi);
    if (!std::isfinite(ref)) return std::numeric_limits<double>::quiet_NaN();
    auto g = [&](double u) {
        const double l = lf(u);
        return std::isfinite(l) ? std::exp(l - ref) : 0.0;
    };
    const auto r = integrate(g, u_hi - width, u_hi, QuadTolerance{0.0, 1e-11, 400});
    return r.converged ? std::exp(ref) * r.value : std::numeric_limits<double>::quiet_NaN();
}

/// 1 - K(t) = int_0^{phi(t)} s^{d-1} |psi^{(d)}(s)| / (d-1)! ds, the distribution
/// function of the radial part; every term is positive.
inline double kendall_survival_remainder(const CopulaSpec& spec, double t) {
    const int d = spec.dim();
    const double lg = std::lgamma(static_cast<double>(d));
    auto lf = [&](double v) { return d * v + spec.log_abs_psi_derivative(d, std::exp(v), v) - lg; };
    // psi^{(d)} may blow up like s^{1/theta - d} at 0, so the integrand can decay as slowly as e^{v/theta}
    const double log_b = log_phi(spec, t);
    const double width = std::min(log_b + 700.0, 45.0 * std::max(1.0, spec.theta()));
    return integrate_log_integrand(lf, log_b, width);
}

/// phi'(t) h_{d-1}(t, beta) as |phi'(t)| int_y^b |psi^{(d)}(s)| (s - y)^{d-2} / (d-2)! ds,
/// y = phi(t), b = phi(beta): the integral form of the Taylor remainder behind h.
inline double weight_remainder(const CopulaSpec& spec, double t, double phi_beta) {
    const int d = spec.dim();
    const double y = phi(spec, t);
    const double gap = phi_beta - y;
    if (!(gap > 0.0)) return 0.0;
    const double lg = std::lgamma(d - 1.0);
    auto lf = [&](double u) {
        const double s = y + std::exp(u);
        return (d - 1) * u + spec.log_abs_psi_derivative(d, s, std::log(s)) - lg;
    };
    return std::exp(log_neg_phi_prime(spec, t)) * integrate_log_integrand(lf, std::log(gap), 45.0);
}

} // namespace detail

/// 1 - K(t) without cancellation: the closed form, or its integral remainder when the
/// closed form falls below kCancellationLevel.
inline KendallValue kendall_survival(const CopulaSpec& spec, double t, const KendallConfig& cfg = {}) {
    const auto k = detail::kendall_cdf_impl(spec, t, &cfg);
    KendallValue out{1.0 - k.value, k.stochastic};
    if (out.value < detail::kCancellationLevel && t < kKendallClamp) {
        const double r = detail::kendall_survival_remainder(spec, t);
        if (std::isfinite(r)) out = {r, false};
    }
    return out;
}

/// K(t), closed form only; throws OverflowError if a derivative is not representable.
inline double kendall_cdf(const CopulaSpec& spec, double t) { return detail::kendall_cdf_impl(spec, t, nullptr).value; }

/// K(t) with the Monte-Carlo fallback of KendallConfig.
inline KendallValue kendall_cdf_eval(const CopulaSpec& spec, double t, const KendallConfig& cfg) {
    return detail::kendall_cdf_impl(spec, t, &cfg);
}

/// k(t) = phi(t)^{d-1}/(d-1)! |phi'(t)| |f_{d-1}(t)|.
inline double kendall_pdf(const CopulaSpec& spec, double t) {
    detail::check_kendall_arg(t);
    t = std::min(t, kKendallClamp);
    const int d = spec.dim();
    const double log_s = log_phi(spec, t);
    const double l = (d - 1) * log_s - std::lgamma(static_cast<double>(d)) + log_neg_phi_prime(spec, t) +
                     spec.log_abs_psi_derivative(d, std::exp(log_s), log_s);
    if (l > detail::kLogMax) throw OverflowError("kendall_pdf: value exceeds double range");
    return std::exp(l);
}

/// h_{d-1}(t, beta) = f_0(t) - f_0(beta) - sum_{i=1}^{d-2} f_i(beta)/i! (phi(t) - phi(beta))^i.
inline double h_factor(const CopulaSpec& spec, double t, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("h_factor: beta must lie in (0, 1)");
    if (!(t < 1.0)) throw DomainError("h_factor: t must be < 1");
    if (!(t > beta)) throw DomainError("h_factor: requires beta < t");
    const double diff = phi(spec, t) - phi(spec, beta);
    detail::CompensatedSum acc;
    acc.add(f_aux(spec, 0, t));
    acc.add(-f_aux(spec, 0, beta));
    double pw = 1.0;
    for (int i = 1; i <= spec.dim() - 2; ++i) {
        pw *= diff / i;
        acc.add(-f_aux(spec, i, beta) * pw);
    }
    return acc.value();
}

/// phi'(t) h_{d-1}(t, beta) for fixed beta, evaluated as 1 - |phi'(t)| T(t) with
///   T(t) = sum_{i=0}^{d-2} |f_i(beta)| (phi(beta) - phi(t))^i / i!,
/// where every term is non-negative. This is the density of U_1 restricted to the
/// unfavorable set {C(u) >= beta}; it vanishes at t = beta and lies in [0, 1].
/// Values below kCancellationLevel come from the integral remainder instead.
class UnfavorableWeight {
public:
    UnfavorableWeight(const CopulaSpec& spec, double beta, const KendallConfig& cfg = {})
        : spec_(spec), beta_(beta) {
        if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("unfavorable weight: beta must lie in [0, 1)");
        if (beta == 0.0) return;
        phi_beta_ = phi(spec, beta);
        const double log_s = log_phi(spec, beta);
        std::array<double, kMaxDim + 1> lpsi{};
        stochastic_ = detail::log_abs_derivatives(spec, beta, log_s, std::span<double>(lpsi.data(), spec.dim()), &cfg);
        for (int i = 0; i <= spec.dim() - 2; ++i) log_f_[i] = lpsi[i + 1] - std::lgamma(i + 1.0);
    }

    double beta() const noexcept { return beta_; }
    bool stochastic() const noexcept { return stochastic_; }

    double operator()(double t) const {
        if (beta_ == 0.0) return (t > 0.0 && t < 1.0) ? 1.0 : 0.0;
        if (!(t > beta_)) return 0.0;
        if (!(t < 1.0)) t = kKendallClamp;
        const double lp = log_neg_phi_prime(spec_, t);
        const double gap = phi_beta_ - phi(spec_, t);
        const double log_gap = gap > 0.0 ? std::log(gap) : -std::numeric_limits<double>::infinity();
        double tsum = std::exp(lp + log_f_[0]);
        for (int i = 1; i <= spec_.dim() - 2; ++i) tsum += std::exp(lp + log_f_[i] + i * log_gap);
        const double w = std::clamp(1.0 - tsum, 0.0, 1.0);
        if (w >= detail::kCancellationLevel) return w;
        const double r = detail::weight_remainder(spec_, t, phi_beta_);
        return std::isfinite(r) ? std::clamp(r, 0.0, 1.0) : w;
    }

private:
    CopulaSpec spec_;
    double beta_;
    double phi_beta_ = 0.0;
    bool stochastic_ = false;
    std::array<double, kMaxDim + 1> log_f_{};
};

} // namespace ccvar

#endif
