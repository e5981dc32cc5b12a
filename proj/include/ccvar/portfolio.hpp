#ifndef CCVAR_PORTFOLIO_HPP
#define CCVAR_PORTFOLIO_HPP

// Portfolio weights and per-asset loss quantile functions F^{-1}(p).

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ccvar/error.hpp"

namespace ccvar {

using QuantileFn = std::function<double(double)>;

inline QuantileFn uniform_quantile(double a = 0.0, double b = 1.0) {
    return [a, b](double p) { return a + (b - a) * p; };
}

inline QuantileFn exponential_quantile(double rate = 1.0) {
    if (!(rate > 0.0)) throw ParameterError("exponential_quantile: rate must be > 0");
    return [rate](double p) { return -std::log1p(-p) / rate; };
}

inline QuantileFn normal_quantile(double mean = 0.0, double sd = 1.0) {
    if (!(sd > 0.0)) throw ParameterError("normal_quantile: sd must be > 0");
    return [dist = boost::math::normal_distribution<double>(mean, sd)](double p) { return boost::math::quantile(dist, p); };
}

inline QuantileFn student_t_quantile(double nu, double loc = 0.0, double scale = 1.0) {
    if (!(nu > 0.0) || !(scale > 0.0)) throw ParameterError("student_t_quantile: nu and scale must be > 0");
    return [dist = boost::math::students_t_distribution<double>(nu), loc, scale](double p) {
        return loc + scale * boost::math::quantile(dist, p);
    };
}

/// Right-continuous inverse of the empirical CDF: the smallest order statistic x with F_n(x) >= p.
inline QuantileFn empirical_quantile(std::vector<double> sample) {
    if (sample.empty()) throw ParameterError("empirical_quantile: empty sample");
    std::sort(sample.begin(), sample.end());
    auto data = std::make_shared<const std::vector<double>>(std::move(sample));
    return [data](double p) {
        const auto n = static_cast<double>(data->size());
        auto k = static_cast<std::size_t>(std::ceil(n * p - 1e-9));
        k = std::clamp<std::size_t>(k, 1, data->size());
        return (*data)[k - 1];
    };
}

inline QuantileFn shifted(QuantileFn q, double k) {
    return [q = std::move(q), k](double p) { return q(p) + k; };
}

inline QuantileFn scaled(QuantileFn q, double s) {
    if (!(s > 0.0)) throw ParameterError("scaled: factor must be > 0");
    return [q = std::move(q), s](double p) { return s * q(p); };
}

/// Convex weights and the matching quantile providers. Providers must be safe to
/// call concurrently.
struct PortfolioSpec {
    std::vector<double> weights;
    std::vector<QuantileFn> quantiles;

    std::size_t dim() const { return weights.size(); }

    void validate() const {
        if (weights.empty()) throw DimensionError("portfolio: no assets");
        if (weights.size() != quantiles.size())
            throw DimensionError("portfolio: " + std::to_string(weights.size()) + " weights but " +
                                 std::to_string(quantiles.size()) + " quantile providers");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0 && w <= 1.0)) throw ParameterError("portfolio: weights must lie in [0, 1]");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ParameterError("portfolio: weights must sum to 1");
        for (const auto& q : quantiles)
            if (!q) throw ParameterError("portfolio: empty quantile provider");
    }

    /// sum_i lambda_i F_i^{-1}(t), every margin at the same level.
    double diagonal_loss(double t) const {
        double v = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (weights[i] != 0.0) v += weights[i] * quantiles[i](t);
        return v;
    }

    /// sum_i lambda_i F_i^{-1}(u_i).
    double loss(std::span<const double> u) const {
        double v = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (weights[i] != 0.0) v += weights[i] * quantiles[i](u[i]);
        return v;
    }
};

inline std::vector<double> equal_weights(std::size_t d) { return std::vector<double>(d, 1.0 / static_cast<double>(d)); }

/// Equal-weight portfolio whose d margins share one quantile function.
inline PortfolioSpec homogeneous_portfolio(std::size_t d, const QuantileFn& q) {
    return PortfolioSpec{equal_weights(d), std::vector<QuantileFn>(d, q)};
}

} // namespace ccvar

#endif
