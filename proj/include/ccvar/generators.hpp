#ifndef CCVAR_GENERATORS_HPP
#define CCVAR_GENERATORS_HPP

// Archimedean generators phi, their inverses psi = phi^{-1}, and the
// derivatives psi^{(n)} that drive the Kendall function, the copula density
// and the CCVaR integral weight.
//
// All derivative magnitudes are evaluated in log-space: for every family
// (-1)^n psi^{(n)}(s) >= 0, and each closed form below is a sum of
// non-negative terms, so log|psi^{(n)}| is computed with log-sum-exp and no
// cancellation occurs.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "ccvar/error.hpp"
#include "ccvar/quadrature.hpp"
#include "ccvar/special_functions.hpp"

namespace ccvar {

enum class Family { Independence, Clayton, Frank, Gumbel, Joe, AMH };

/// Largest copula dimension supported by the exact Stirling tables.
inline constexpr int kMaxDim = 20;

inline constexpr std::array<Family, 5> kArchimedeanFamilies{Family::Clayton, Family::Frank, Family::Gumbel,
                                                            Family::Joe, Family::AMH};

inline std::string_view to_string(Family f) {
    switch (f) {
    case Family::Independence: return "independence";
    case Family::Clayton: return "clayton";
    case Family::Frank: return "frank";
    case Family::Gumbel: return "gumbel";
    case Family::Joe: return "joe";
    case Family::AMH: return "amh";
    }
    return "unknown";
}

inline Family parse_family(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "independence" || s == "indep" || s == "product") return Family::Independence;
    if (s == "clayton") return Family::Clayton;
    if (s == "frank") return Family::Frank;
    if (s == "gumbel") return Family::Gumbel;
    if (s == "joe") return Family::Joe;
    if (s == "amh" || s == "ali-mikhail-haq") return Family::AMH;
    throw ParameterError("unknown copula family '" + std::string(name) + "'");
}

struct TailCoefficients {
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
};

namespace detail {

inline constexpr double kLogMax = 709.782712893384; // log(DBL_MAX)

/// log(e^s - 1), accurate for tiny s (given log s) and for large s.
inline double log_expm1(double s, double log_s) {
    if (s < 1e-10) return log_s + 0.5 * s;
    if (s > 35.0) return s + std::log1p(-std::exp(-s));
    return std::log(std::expm1(s));
}

/// log(1 - e^{-s}).
inline double log_one_minus_exp_neg(double s, double log_s) {
    if (s < 1e-10) return log_s - 0.5 * s;
    return std::log(-std::expm1(-s));
}

/// Admissible-range check shared by the constructor and tau_inverse.
inline void validate_theta(Family f, double theta) {
    auto bad = [&](const char* range) {
        throw ParameterError(std::string(to_string(f)) + ": theta=" + std::to_string(theta) +
                             " outside admissible range " + range);
    };
    if (!std::isfinite(theta) && f != Family::Independence) bad("(finite)");
    switch (f) {
    case Family::Independence: break;
    case Family::Clayton:
        if (!(theta > 0.0)) bad("(0, inf)");
        break;
    case Family::Frank:
        if (!(theta > 0.0)) bad("(0, inf)");
        break;
    case Family::Gumbel:
        if (!(theta >= 1.0)) bad("[1, inf)");
        break;
    case Family::Joe:
        if (!(theta >= 1.0)) bad("[1, inf)");
        break;
    case Family::AMH:
        if (!(theta >= 0.0 && theta < 1.0)) bad("[0, 1)");
        break;
    }
}

} // namespace detail

/// An exchangeable Archimedean copula: family, dependence parameter, dimension.
/// Immutable; the polynomial coefficient tables for the derivative formulas are
/// built once at construction and shared between copies.
class CopulaSpec {
public:
    CopulaSpec(Family family, double theta, int dim) : family_(family), theta_(theta), dim_(dim) {
        if (dim < 2 || dim > kMaxDim)
            throw IndexError("CopulaSpec: dimension must lie in [2, " + std::to_string(kMaxDim) + "]");
        if (family == Family::Independence) theta_ = 0.0;
        detail::validate_theta(family, theta_);
        build_tables();
    }

    static CopulaSpec independence(int dim) { return CopulaSpec(Family::Independence, 0.0, dim); }

    Family family() const noexcept { return family_; }
    double theta() const noexcept { return theta_; }
    int dim() const noexcept { return dim_; }

    /// Same family and parameter in another dimension.
    CopulaSpec with_dim(int dim) const { return CopulaSpec(family_, theta_, dim); }

    /// Non-negative polynomial coefficients used for psi^{(n)}, 1 <= n <= dim:
    ///   Gumbel: a^G_{n,k}, k = 1..n     Joe: a^J_{n,k}, k = 1..n
    ///   Frank:  k! S(n, k+1), k = 0..n-1   AMH: k! S(n+1, k+1), k = 0..n
    std::span<const double> coefficients(int n) const {
        if (!tables_ || n < 1 || n > dim_) throw IndexError("CopulaSpec::coefficients: order out of range");
        return (*tables_)[n];
    }

    /// log((-1)^n psi^{(n)}(s)) for 0 <= n <= dim and s >= 0. log_s = log(s) may be
    /// supplied when s itself underflows.
    double log_abs_psi_derivative(int n, double s, double log_s) const;
    double log_abs_psi_derivative(int n, double s) const {
        return log_abs_psi_derivative(n, s, std::log(s));
    }

private:
    void build_tables();

    Family family_;
    double theta_;
    int dim_;
    std::shared_ptr<const std::vector<std::vector<double>>> tables_;
};

inline void CopulaSpec::build_tables() {
    std::vector<std::vector<double>> t(dim_ + 1);
    const double alpha = (theta_ > 0.0) ? 1.0 / theta_ : 1.0;
    switch (family_) {
    case Family::Gumbel: {
        // a_{1,1} = alpha; a_{n+1,k} = alpha a_{n,k-1} + (n - alpha k) a_{n,k}. Every
        // term is non-negative for alpha in (0, 1].
        t[1] = {alpha};
        for (int n = 1; n < dim_; ++n) {
            std::vector<double> next(n + 1, 0.0);
            for (int k = 1; k <= n + 1; ++k) {
                double v = 0.0;
                if (k - 1 >= 1) v += alpha * t[n][k - 2];
                if (k <= n) v += (n - alpha * k) * t[n][k - 1];
                next[k - 1] = std::max(v, 0.0);
            }
            t[n + 1] = std::move(next);
        }
        break;
    }
    case Family::Joe:
        for (int n = 1; n <= dim_; ++n) {
            t[n].resize(n);
            for (int k = 1; k <= n; ++k) t[n][k - 1] = joe_poly_coeff(n, k, theta_);
        }
        break;
    case Family::Frank:
        for (int n = 1; n <= dim_; ++n) {
            t[n].resize(n);
            double fact = 1.0;
            for (int k = 0; k < n; ++k) {
                if (k > 0) fact *= k;
                t[n][k] = fact * static_cast<double>(stirling_second(n, k + 1));
            }
        }
        break;
    case Family::AMH:
        for (int n = 1; n <= dim_; ++n) {
            t[n].resize(n + 1);
            double fact = 1.0;
            for (int k = 0; k <= n; ++k) {
                if (k > 0) fact *= k;
                t[n][k] = fact * static_cast<double>(stirling_second(n + 1, k + 1));
            }
        }
        break;
    default: break;
    }
    tables_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(t));
}

// ---------------------------------------------------------------------------
// generator, derivative, inverse

namespace detail {

inline void check_open_unit(double t, const char* what) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError(std::string(what) + ": argument must lie in (0, 1)");
}

} // namespace detail

/// phi(t) for t in (0, 1].
inline double phi(const CopulaSpec& spec, double t) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("phi: t must lie in (0, 1]");
    if (t == 1.0) return 0.0;
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return -std::log(t);
    case Family::Clayton: return std::expm1(-th * std::log(t));
    case Family::Frank:
        // e^{-th t} - e^{-th} = -e^{-th t} expm1(-th (1-t))
        return -std::log1p(-std::exp(-th * t) * std::expm1(-th * (1.0 - t)) / std::expm1(-th));
    case Family::Gumbel: return std::pow(-std::log(t), th);
    case Family::Joe: return -std::log1p(-std::exp(th * std::log1p(-t)));
    case Family::AMH: return std::log1p((1.0 - t) * (1.0 - th) / t);
    }
    return 0.0;
}

/// log(phi(t)) for t in (0, 1), finite even when phi(t) underflows.
inline double log_phi(const CopulaSpec& spec, double t) {
    detail::check_open_unit(t, "log_phi");
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return std::log(-std::log(t));
    case Family::Clayton: {
        const double x = -th * std::log(t);
        return detail::log_expm1(x, std::log(x));
    }
    case Family::Gumbel: return th * std::log(-std::log(t));
    case Family::Joe: {
        const double log_y = th * std::log1p(-t);
        if (log_y < -30.0) return log_y + 0.5 * std::exp(log_y);
        return std::log(-std::log1p(-std::exp(log_y)));
    }
    default: return std::log(phi(spec, t));
    }
}

/// phi'(t) for t in (0, 1); strictly negative.
inline double phi_prime(const CopulaSpec& spec, double t) {
    detail::check_open_unit(t, "phi_prime");
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return -1.0 / t;
    case Family::Clayton: return -th * std::exp((-th - 1.0) * std::log(t));
    case Family::Frank: return -th / std::expm1(th * t);
    case Family::Gumbel: return -th * std::pow(-std::log(t), th - 1.0) / t;
    case Family::Joe: {
        const double l1 = std::log1p(-t);
        return -th * std::exp((th - 1.0) * l1) / -std::expm1(th * l1);
    }
    case Family::AMH: return -(1.0 - th) / (t * (1.0 - th * (1.0 - t)));
    }
    return 0.0;
}

/// log(-phi'(t)) for t in (0, 1).
inline double log_neg_phi_prime(const CopulaSpec& spec, double t) {
    detail::check_open_unit(t, "log_neg_phi_prime");
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return -std::log(t);
    case Family::Clayton: return std::log(th) - (th + 1.0) * std::log(t);
    case Family::Frank: {
        const double x = th * t;
        return std::log(th) - detail::log_expm1(x, std::log(x));
    }
    case Family::Gumbel: return std::log(th) + (th - 1.0) * std::log(-std::log(t)) - std::log(t);
    case Family::Joe: {
        const double l1 = std::log1p(-t);
        return std::log(th) + (th - 1.0) * l1 - std::log(-std::expm1(th * l1));
    }
    case Family::AMH: return std::log1p(-th) - std::log(t) - std::log1p(-th * (1.0 - t));
    }
    return 0.0;
}

/// psi(s) = phi^{-1}(s) for s >= 0 (s = +inf maps to 0).
inline double phi_inv(const CopulaSpec& spec, double s) {
    if (!(s >= 0.0)) throw DomainError("phi_inv: s must be >= 0");
    if (s == 0.0) return 1.0;
    if (std::isinf(s)) return 0.0;
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return std::exp(-s);
    case Family::Clayton: return std::exp(-std::log1p(s) / th);
    case Family::Frank: return -std::log(std::exp(-th - s) - std::expm1(-s)) / th;
    case Family::Gumbel: return std::exp(-std::pow(s, 1.0 / th));
    case Family::Joe: return -std::expm1(std::log(-std::expm1(-s)) / th);
    case Family::AMH: return (1.0 - th) / (std::expm1(s) + 1.0 - th);
    }
    return 0.0;
}

inline double CopulaSpec::log_abs_psi_derivative(int n, double s, double log_s) const {
    if (n < 0 || n > dim_) throw IndexError("log_abs_psi_derivative: order must lie in [0, dim]");
    if (!(s >= 0.0)) throw DomainError("log_abs_psi_derivative: s must be >= 0");
    if (n == 0) return std::log(phi_inv(*this, s));
    const double th = theta_;
    std::array<double, kMaxDim + 2> terms{};
    std::size_t m = 0;
    switch (family_) {
    case Family::Independence: return -s;
    case Family::Clayton: {
        const double a = 1.0 / th;
        return std::lgamma(n + a) - std::lgamma(a) - (n + a) * std::log1p(s);
    }
    case Family::Frank: {
        // |psi^{(n)}(s)| = (1/theta) Li_{1-n}(z), z = (1-e^{-theta}) e^{-s}; in w = z/(1-z)
        // the polylog is sum_k k! S(n,k+1) w^{k+1}.
        const double log_w = std::log(-std::expm1(-th)) - std::log(std::expm1(s) + std::exp(-th));
        const auto c = coefficients(n);
        for (int k = 0; k < n; ++k) terms[m++] = std::log(c[k]) + (k + 1) * log_w;
        return -std::log(th) + detail::log_sum_exp(std::span<const double>(terms.data(), m));
    }
    case Family::Gumbel: {
        if (th == 1.0) return -s;
        if (s == 0.0 && !std::isfinite(log_s)) return std::numeric_limits<double>::infinity();
        // |psi^{(n)}(s)| = psi(s) s^{-n} P_n(s^{1/theta})
        const double log_x = log_s / th;
        const double x = std::exp(log_x);
        const auto c = coefficients(n);
        for (int k = 1; k <= n; ++k)
            if (c[k - 1] > 0.0) terms[m++] = std::log(c[k - 1]) + k * log_x;
        return -x - n * log_s + detail::log_sum_exp(std::span<const double>(terms.data(), m));
    }
    case Family::Joe: {
        // |psi^{(n)}(s)| = alpha y (1-y)^{alpha-1} sum_k a_{nk} r^{k-1}, y = e^{-s}, r = y/(1-y)
        const double alpha = 1.0 / th;
        if (th == 1.0) return -s;
        const double log_1my = detail::log_one_minus_exp_neg(s, log_s);
        const double log_r = -detail::log_expm1(s, log_s);
        const auto c = coefficients(n);
        for (int k = 1; k <= n; ++k)
            if (c[k - 1] > 0.0) terms[m++] = std::log(c[k - 1]) + (k - 1) * log_r;
        return std::log(alpha) - s + (alpha - 1.0) * log_1my +
               detail::log_sum_exp(std::span<const double>(terms.data(), m));
    }
    case Family::AMH: {
        // |psi^{(n)}(s)| = psi(s) sum_k k! S(n+1,k+1) w^k, w = theta/(e^s - theta)
        const double denom = std::expm1(s) + 1.0 - th;
        const double log_psi = std::log1p(-th) - std::log(denom);
        const auto c = coefficients(n);
        terms[m++] = 0.0;
        if (th > 0.0) {
            const double log_w = std::log(th) - std::log(denom);
            for (int k = 1; k <= n; ++k) terms[m++] = std::log(c[k]) + k * log_w;
        }
        return log_psi + detail::log_sum_exp(std::span<const double>(terms.data(), m));
    }
    }
    return 0.0;
}

/// log|f_i(t)| where f_i(t) = psi^{(i+1)}(phi(t)).
inline double log_abs_f_aux(const CopulaSpec& spec, int i, double t) {
    detail::check_open_unit(t, "f_aux");
    if (i < 0 || i > spec.dim() - 1) throw IndexError("f_aux: order i must lie in [0, dim-1]");
    const double log_s = log_phi(spec, t);
    return spec.log_abs_psi_derivative(i + 1, std::exp(log_s), log_s);
}

/// f_i(t) = d^{i+1}/ds^{i+1} phi^{-1}(s) at s = phi(t); sign (-1)^{i+1}.
inline double f_aux(const CopulaSpec& spec, int i, double t) {
    const double l = log_abs_f_aux(spec, i, t);
    if (l > detail::kLogMax)
        throw OverflowError("f_aux: |f_" + std::to_string(i) + "(" + std::to_string(t) + ")| exceeds double range");
    const double v = std::exp(l);
    return (i % 2 == 0) ? -v : v;
}

// ---------------------------------------------------------------------------
// association and tail dependence

/// Debye function of order one, D_1(x) = (1/x) int_0^x t/(e^t - 1) dt.
inline double debye1(double x) {
    if (x == 0.0) return 1.0;
    auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
    const auto r = integrate(integrand, 0.0, x, {1e-15, 1e-14, 400});
    return r.value / x;
}

namespace detail {

inline double frank_tau(double th) {
    if (th < 1e-2) {
        const double t2 = th * th;
        return th * (1.0 / 9.0 - t2 / 900.0 + t2 * t2 / 52920.0 - t2 * t2 * t2 / 2721600.0);
    }
    return 1.0 + 4.0 * (debye1(th) - 1.0) / th;
}

inline double joe_tau(double th) {
    double sum = 0.0;
    long k = 1;
    for (;; ++k) {
        const double kd = static_cast<double>(k);
        const double term = 1.0 / (kd * (th * kd + 2.0) * (th * (kd - 1.0) + 2.0));
        sum += term;
        if (term < 1e-14) break;
    }
    // remainder of the truncated sum: terms behave like 1/(theta^2 k^3)
    const double kh = static_cast<double>(k) + 0.5;
    sum += 1.0 / (2.0 * th * th * kh * kh);
    return 1.0 - 4.0 * sum;
}

inline double amh_tau(double th) {
    if (th == 0.0) return 0.0;
    if (th < 0.5) {
        // sum_{m>=1} 4 theta^m / (3 m (m+1) (m+2))
        double sum = 0.0, p = 1.0;
        for (int m = 1; m < 200; ++m) {
            p *= th;
            const double term = 4.0 * p / (3.0 * m * (m + 1.0) * (m + 2.0));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    }
    return 1.0 - 2.0 * (th + (1.0 - th) * (1.0 - th) * std::log1p(-th)) / (3.0 * th * th);
}

} // namespace detail

/// Kendall's tau of the bivariate member of the family.
inline double kendall_tau(const CopulaSpec& spec) {
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return 0.0;
    case Family::Clayton: return th / (th + 2.0);
    case Family::Frank: return detail::frank_tau(th);
    case Family::Gumbel: return (th - 1.0) / th;
    case Family::Joe: return detail::joe_tau(th);
    case Family::AMH: return detail::amh_tau(th);
    }
    return 0.0;
}

struct TauRange {
    double lo, hi;
    bool lo_closed, hi_closed;
};

inline TauRange attainable_tau(Family f) {
    switch (f) {
    case Family::Independence: return {0.0, 0.0, true, true};
    case Family::Clayton:
    case Family::Frank: return {0.0, 1.0, false, false};
    case Family::Gumbel:
    case Family::Joe: return {0.0, 1.0, true, false};
    case Family::AMH: return {0.0, 1.0 / 3.0, true, false};
    }
    return {0.0, 0.0, true, true};
}

/// Dependence parameter whose Kendall's tau equals tau.
inline double tau_inverse(Family family, double tau) {
    const auto r = attainable_tau(family);
    const bool ok = (r.lo_closed ? tau >= r.lo : tau > r.lo) && (r.hi_closed ? tau <= r.hi : tau < r.hi);
    if (!ok) {
        throw ParameterError("tau_inverse: tau=" + std::to_string(tau) + " not attainable by " +
                             std::string(to_string(family)) + "; attainable interval " + (r.lo_closed ? "[" : "(") +
                             std::to_string(r.lo) + ", " + std::to_string(r.hi) + (r.hi_closed ? "]" : ")"));
    }
    switch (family) {
    case Family::Independence: return 0.0;
    case Family::Clayton: return 2.0 * tau / (1.0 - tau);
    case Family::Gumbel: return 1.0 / (1.0 - tau);
    default: break;
    }
    if (tau == 0.0) return family == Family::Joe ? 1.0 : 0.0;

    auto tau_of = [family](double th) { return kendall_tau(CopulaSpec(family, th, 2)); };
    double lo = 0.0, hi = 0.0;
    if (family == Family::Frank) {
        lo = 1e-12;
        hi = 1.0;
        while (tau_of(hi) < tau) {
            lo = hi;
            hi *= 2.0;
        }
    } else if (family == Family::Joe) {
        lo = 1.0;
        hi = 2.0;
        while (tau_of(hi) < tau) {
            lo = hi;
            hi *= 2.0;
        }
    } else { // AMH
        lo = 0.0;
        hi = std::nextafter(1.0, 0.0);
    }
    std::uintmax_t iters = 200;
    auto f = [&](double th) { return tau_of(th) - tau; };
    const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi),
                                                           boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (bracket.first + bracket.second);
}

/// Bivariate lower and upper tail-dependence coefficients.
inline TailCoefficients tail_dependence(const CopulaSpec& spec) {
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Clayton: return {std::pow(2.0, -1.0 / th), 0.0};
    case Family::Gumbel:
    case Family::Joe: return {0.0, 2.0 - std::pow(2.0, 1.0 / th)};
    default: return {0.0, 0.0};
    }
}

// ---------------------------------------------------------------------------
// copula distribution and density

/// C(u) = psi(sum phi(u_i)); zero when any coordinate is zero.
inline double copula_cdf(const CopulaSpec& spec, std::span<const double> u) {
    if (static_cast<int>(u.size()) != spec.dim())
        throw DimensionError("copula_cdf: expected " + std::to_string(spec.dim()) + " coordinates, got " +
                             std::to_string(u.size()));
    double s = 0.0;
    for (double x : u) {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("copula_cdf: coordinates must lie in [0, 1]");
        if (x == 0.0) return 0.0;
    }
    for (double x : u) s += phi(spec, x);
    return phi_inv(spec, s);
}

/// log c(u) = log|psi^{(d)}(sum phi(u_i))| + sum log|phi'(u_i)|.
inline double log_copula_density(const CopulaSpec& spec, std::span<const double> u) {
    if (static_cast<int>(u.size()) != spec.dim()) throw DimensionError("copula_density: dimension mismatch");
    double s = 0.0, log_jac = 0.0;
    for (double x : u) {
        if (!(x > 0.0 && x < 1.0)) throw DomainError("copula_density: coordinates must lie in (0, 1)");
        s += phi(spec, x);
        log_jac += log_neg_phi_prime(spec, x);
    }
    return spec.log_abs_psi_derivative(spec.dim(), s) + log_jac;
}

inline double copula_density(const CopulaSpec& spec, std::span<const double> u) {
    const double l = log_copula_density(spec, u);
    if (l > detail::kLogMax) throw OverflowError("copula_density: value exceeds double range");
    return std::exp(l);
}

} // namespace ccvar

#endif
