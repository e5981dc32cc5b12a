#ifndef CCVAR_FRAILTY_HPP
#define CCVAR_FRAILTY_HPP

// Frailty laws V with E[exp(-sV)] = phi^{-1}(s):
//   Clayton  Gamma(1/theta)             Gumbel  positive stable, index 1/theta
//   Frank    logarithmic, p = 1-e^-theta Joe     Sibuya(1/theta)
//   AMH      Geometric(1-theta) on 1,2,.. Independence  V = 1
// Draws are returned as log V because Gamma(1/theta) underflows for large theta.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ccvar/error.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/random.hpp"

namespace ccvar {

struct FrailtyDraw {
    double value = 1.0;
    double log_value = 0.0;
};

/// Monte-Carlo estimate with its standard error.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

namespace detail {

inline double log_gamma_variate(double shape, Engine& rng) {
    if (shape >= 1.0) {
        std::gamma_distribution<double> g(shape, 1.0);
        return std::log(g(rng));
    }
    // G(a) = G(a+1) U^{1/a}
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    const double x = g(rng);
    return std::log(x) + std::log(uniform_open(rng)) / shape;
}

/// Positive stable with Laplace transform exp(-s^alpha), Kanter's representation.
inline double log_positive_stable(double alpha, Engine& rng) {
    if (alpha == 1.0) return 0.0;
    const double u = std::numbers::pi * uniform_open(rng);
    const double e = standard_exponential(rng);
    return std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
           (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(e));
}

/// Logarithmic series P(V=k) = p^k / (-k log(1-p)), Kemp's LK algorithm; h = log(1-p).
inline double logarithmic_variate(double p, double h, Engine& rng) {
    const double v = uniform_open(rng);
    if (v >= p) return 1.0;
    const double q = -std::expm1(uniform_open(rng) * h);
    if (v <= q * q) {
        const double k = std::floor(1.0 + std::log(v) / std::log(q));
        return std::max(1.0, k);
    }
    return v <= q ? 2.0 : 1.0;
}

/// Sibuya(alpha), P(V > n) = Gamma(n+1-alpha) / (Gamma(n+1) Gamma(1-alpha)), by inversion.
inline double sibuya_variate(double alpha, Engine& rng) {
    if (alpha >= 1.0) return 1.0;
    const double log_w = std::log(uniform_open(rng));
    const double lg1 = std::lgamma(1.0 - alpha);
    auto log_surv = [&](double n) {
        const double x = n + 1.0;
        if (x > 1e7) return -alpha * std::log(x) + alpha * (1.0 + alpha) / (2.0 * x) - lg1;
        return std::lgamma(x - alpha) - std::lgamma(x) - lg1;
    };
    // tail asymptotics P(V > n) ~ n^{-alpha} / Gamma(1-alpha) give a starting point
    const double n0 = std::exp(-(log_w + lg1) / alpha);
    if (n0 > 1e15) return std::floor(n0);
    // smallest n >= 1 with log_surv(n) <= log_w, bracketed then bisected
    double lo = std::max(1.0, std::floor(n0)), hi = lo;
    while (lo > 1.0 && log_surv(lo - 1.0) <= log_w) lo = std::max(1.0, std::floor(lo / 2.0));
    while (log_surv(hi) > log_w) hi *= 2.0;
    if (log_surv(lo) <= log_w) return lo;
    while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        (log_surv(mid) <= log_w ? hi : lo) = mid;
    }
    return hi;
}

} // namespace detail

/// One draw of log V from the frailty law of spec.
inline double sample_log_frailty(const CopulaSpec& spec, Engine& rng) {
    const double th = spec.theta();
    switch (spec.family()) {
    case Family::Independence: return 0.0;
    case Family::Clayton: return detail::log_gamma_variate(1.0 / th, rng);
    case Family::Gumbel: return detail::log_positive_stable(1.0 / th, rng);
    case Family::Frank: return std::log(detail::logarithmic_variate(-std::expm1(-th), -th, rng));
    case Family::Joe: return std::log(detail::sibuya_variate(1.0 / th, rng));
    case Family::AMH: {
        if (th == 0.0) return 0.0;
        const double k = 1.0 + std::floor(std::log(uniform_open(rng)) / std::log(th));
        return std::log(k);
    }
    }
    return 0.0;
}

inline FrailtyDraw sample_frailty(const CopulaSpec& spec, std::uint64_t seed) {
    Engine rng = make_stream(seed, 0);
    const double lv = sample_log_frailty(spec, rng);
    return {std::exp(lv), lv};
}

/// n draws of log V, block-seeded so the output is independent of thread count.
inline std::vector<double> sample_log_frailties(const CopulaSpec& spec, std::size_t n, std::uint64_t seed,
                                                unsigned threads = 0) {
    std::vector<double> out(n);
    for_each_block(n, threads, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        Engine rng = make_stream(seed, b);
        for (std::size_t i = lo; i < hi; ++i) out[i] = sample_log_frailty(spec, rng);
    });
    return out;
}

/// Unbiased estimate of psi^{(i+1)}(s) = (-1)^{i+1} E[V^{i+1} e^{-sV}] from m frailty draws.
inline McEstimate f_aux_mc_estimate(const CopulaSpec& spec, int i, double s, std::size_t m, std::uint64_t seed) {
    if (!(s > 0.0)) throw DomainError("f_aux_mc: s must be > 0");
    if (i < 0) throw IndexError("f_aux_mc: order must be >= 0");
    if (m < 1) throw ParameterError("f_aux_mc: m must be >= 1");
    const auto lv = sample_log_frailties(spec, m, seed, 1);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double v = std::exp(lv[k]);
        const double x = std::exp((i + 1) * lv[k] - s * v);
        const double delta = x - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (x - mean);
    }
    const double sign = (i % 2 == 0) ? -1.0 : 1.0;
    const double se = m > 1 ? std::sqrt(m2 / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
    return {sign * mean, se, m};
}

inline double f_aux_mc(const CopulaSpec& spec, int i, double s, std::size_t m, std::uint64_t seed) {
    return f_aux_mc_estimate(spec, i, s, m, seed).value;
}

} // namespace ccvar

#endif
