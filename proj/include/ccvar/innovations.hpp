#ifndef CCVAR_INNOVATIONS_HPP
#define CCVAR_INNOVATIONS_HPP

// Standardized (zero mean, unit variance) innovation laws for GARCH margins:
// Normal, Student-t and the Fernandez-Steel skewed t.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ccvar/error.hpp"
#include "ccvar/random.hpp"

namespace ccvar {

enum class InnovationKind { Normal, StudentT, SkewedT };

inline std::string_view to_string(InnovationKind k) {
    switch (k) {
    case InnovationKind::Normal: return "normal";
    case InnovationKind::StudentT: return "t";
    case InnovationKind::SkewedT: return "skewt";
    }
    return "unknown";
}

inline InnovationKind parse_innovation(std::string_view name) {
    if (name == "normal" || name == "norm" || name == "gaussian") return InnovationKind::Normal;
    if (name == "t" || name == "student" || name == "std" || name == "studentt") return InnovationKind::StudentT;
    if (name == "skewt" || name == "sstd" || name == "skewed-t" || name == "skewedt") return InnovationKind::SkewedT;
    throw ParameterError("unknown innovation '" + std::string(name) + "' (normal, t, skewt)");
}

/// Innovation law. nu is the degrees of freedom (t, skewt), skew the Fernandez-Steel
/// parameter (skewt; 1 means symmetric).
class Innovation {
public:
    Innovation() = default;
    explicit Innovation(InnovationKind kind, double nu = 8.0, double skew = 1.0) : kind_(kind), nu_(nu), skew_(skew) {
        if (kind_ == InnovationKind::Normal) {
            nu_ = 0.0;
            skew_ = 1.0;
        } else if (kind_ == InnovationKind::StudentT) {
            skew_ = 1.0;
        }
        validate();
        prepare();
    }

    static Innovation normal() { return Innovation(InnovationKind::Normal); }
    static Innovation student_t(double nu) { return Innovation(InnovationKind::StudentT, nu); }
    static Innovation skewed_t(double nu, double skew) { return Innovation(InnovationKind::SkewedT, nu, skew); }

    InnovationKind kind() const noexcept { return kind_; }
    double nu() const noexcept { return nu_; }
    double skew() const noexcept { return skew_; }

    /// Number of shape parameters (0, 1 or 2).
    int shape_count() const noexcept {
        return kind_ == InnovationKind::Normal ? 0 : (kind_ == InnovationKind::StudentT ? 1 : 2);
    }

    void validate() const {
        if (kind_ != InnovationKind::Normal && !(nu_ > 2.0 && std::isfinite(nu_)))
            throw ParameterError("innovation: degrees of freedom must be > 2");
        if (kind_ == InnovationKind::SkewedT && !(skew_ > 0.0 && std::isfinite(skew_)))
            throw ParameterError("innovation: skewness parameter must be > 0");
    }

    double log_pdf(double z) const {
        switch (kind_) {
        case InnovationKind::Normal: return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
        case InnovationKind::StudentT: return log_g(z);
        case InnovationKind::SkewedT: {
            const double x = mean_ + sd_ * z;
            const double y = x >= 0.0 ? x / skew_ : x * skew_;
            return std::log(sd_) + log_norm_ + log_g(y);
        }
        }
        return 0.0;
    }

    double pdf(double z) const { return std::exp(log_pdf(z)); }

    double cdf(double z) const {
        switch (kind_) {
        case InnovationKind::Normal: return boost::math::cdf(boost::math::normal_distribution<double>(), z);
        case InnovationKind::StudentT: return g_cdf(z);
        case InnovationKind::SkewedT: {
            const double x = mean_ + sd_ * z;
            const double xi2 = skew_ * skew_;
            if (x < 0.0) return 2.0 / (xi2 + 1.0) * g_cdf(x * skew_);
            return 1.0 / (1.0 + xi2) + 2.0 * xi2 / (1.0 + xi2) * (g_cdf(x / skew_) - 0.5);
        }
        }
        return 0.0;
    }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("innovation quantile: p must lie in (0, 1)");
        switch (kind_) {
        case InnovationKind::Normal: return boost::math::quantile(boost::math::normal_distribution<double>(), p);
        case InnovationKind::StudentT: return g_quantile(p);
        case InnovationKind::SkewedT: {
            const double xi2 = skew_ * skew_;
            const double p0 = 1.0 / (1.0 + xi2);
            double x;
            if (p < p0)
                x = g_quantile(p * (1.0 + xi2) / 2.0) / skew_;
            else
                x = skew_ * g_quantile(0.5 + (p - p0) * (1.0 + xi2) / (2.0 * xi2));
            return (x - mean_) / sd_;
        }
        }
        return 0.0;
    }

    double sample(Engine& rng) const {
        switch (kind_) {
        case InnovationKind::Normal: {
            std::normal_distribution<double> n;
            return n(rng);
        }
        case InnovationKind::StudentT: {
            std::student_t_distribution<double> t(nu_);
            return t(rng) * t_scale_;
        }
        case InnovationKind::SkewedT: {
            std::student_t_distribution<double> t(nu_);
            const double a = std::abs(t(rng) * t_scale_);
            const double xi2 = skew_ * skew_;
            const double x = uniform_open(rng) < xi2 / (1.0 + xi2) ? skew_ * a : -a / skew_;
            return (x - mean_) / sd_;
        }
        }
        return 0.0;
    }

private:
    void prepare() {
        if (kind_ == InnovationKind::Normal) return;
        t_scale_ = std::sqrt((nu_ - 2.0) / nu_);
        log_g_const_ = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) - 0.5 * std::log(std::numbers::pi * (nu_ - 2.0));
        if (kind_ == InnovationKind::SkewedT) {
            const double m1 = 2.0 * std::sqrt(nu_ - 2.0) * std::exp(std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_)) /
                              (std::sqrt(std::numbers::pi) * (nu_ - 1.0));
            const double xi = skew_;
            mean_ = m1 * (xi - 1.0 / xi);
            sd_ = std::sqrt((1.0 - m1 * m1) * (xi * xi + 1.0 / (xi * xi)) + 2.0 * m1 * m1 - 1.0);
            log_norm_ = std::log(2.0 / (xi + 1.0 / xi));
        }
    }

    /// unit-variance t density and distribution
    double log_g(double x) const { return log_g_const_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / (nu_ - 2.0)); }
    double g_cdf(double x) const { return boost::math::cdf(boost::math::students_t_distribution<double>(nu_), x / t_scale_); }
    double g_quantile(double p) const {
        return t_scale_ * boost::math::quantile(boost::math::students_t_distribution<double>(nu_), p);
    }

    InnovationKind kind_ = InnovationKind::Normal;
    double nu_ = 0.0;
    double skew_ = 1.0;
    double t_scale_ = 1.0;
    double log_g_const_ = 0.0;
    double mean_ = 0.0;
    double sd_ = 1.0;
    double log_norm_ = 0.0;
};

/// Cubic Hermite table of the innovation quantile in x = logit(p), with the exact
/// slope dQ/dx = p (1 - p) / f(Q). For bulk Monte-Carlo transforms; single
/// evaluations should call Innovation::quantile.
class QuantileTable {
public:
    explicit QuantileTable(const Innovation& innov, double x_max = 30.0, double step = 0.02)
        : x_min_(-x_max), step_(step) {
        const auto n = static_cast<std::size_t>(std::ceil(2.0 * x_max / step)) + 1;
        q_.resize(n);
        dq_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = x_min_ + step_ * static_cast<double>(k);
            const double p = 1.0 / (1.0 + std::exp(-x));
            q_[k] = innov.quantile(p);
            dq_[k] = p * (1.0 - p) / innov.pdf(q_[k]);
        }
    }

    double operator()(double p) const {
        const double x = std::log(p / (1.0 - p));
        double pos = (x - x_min_) / step_;
        const double last = static_cast<double>(q_.size() - 1);
        pos = std::clamp(pos, 0.0, last);
        auto k = static_cast<std::size_t>(pos);
        if (k >= q_.size() - 1) k = q_.size() - 2;
        const double t = pos - static_cast<double>(k);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * q_[k] + h10 * step_ * dq_[k] + h01 * q_[k + 1] + h11 * step_ * dq_[k + 1];
    }

private:
    double x_min_;
    double step_;
    std::vector<double> q_;
    std::vector<double> dq_;
};

} // namespace ccvar

#endif
