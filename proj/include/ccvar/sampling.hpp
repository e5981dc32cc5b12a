#ifndef CCVAR_SAMPLING_HPP
#define CCVAR_SAMPLING_HPP

// Marshall-Olkin sampling U_j = psi(E_j / V) and empirical portfolio VaR / CVaR.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ccvar/error.hpp"
#include "ccvar/frailty.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/portfolio.hpp"
#include "ccvar/random.hpp"

namespace ccvar {

/// n x d matrix of points strictly inside (0,1)^d, row-major.
class UniformPanel {
public:
    UniformPanel() = default;
    UniformPanel(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.5) {}
    UniformPanel(std::size_t rows, std::size_t dim, std::vector<double> data)
        : rows_(rows), dim_(dim), data_(std::move(data)) {
        if (data_.size() != rows_ * dim_) throw DimensionError("UniformPanel: data size does not match rows x dim");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    const std::vector<double>& data() const noexcept { return data_; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    /// Throws DomainError unless every entry lies strictly inside (0, 1).
    void validate() const {
        for (std::size_t k = 0; k < data_.size(); ++k)
            if (!(data_[k] > 0.0 && data_[k] < 1.0))
                throw DomainError("UniformPanel: entry at row " + std::to_string(k / dim_) + ", column " +
                                  std::to_string(k % dim_) + " outside (0, 1)");
    }

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// psi(s) from log s; keeps Clayton and Gumbel accurate when s is astronomically large or small.
inline double psi_from_log_s(const CopulaSpec& spec, double log_s) {
    const double th = spec.theta();
    double u = 0.0;
    switch (spec.family()) {
    case Family::Independence: u = std::exp(-std::exp(log_s)); break;
    case Family::Clayton: u = std::exp(-softplus(log_s) / th); break;
    case Family::Gumbel: u = std::exp(-std::exp(log_s / th)); break;
    default: {
        const double s = std::exp(log_s);
        u = std::isinf(s) ? 0.0 : phi_inv(spec, s);
    }
    }
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(u, lo, hi);
}

} // namespace detail

/// n rows from the copula via U_ij = psi(E_ij / V_i). Deterministic in seed for any thread count.
inline UniformPanel sample_copula(const CopulaSpec& spec, std::size_t n, std::uint64_t seed, unsigned threads = 0) {
    if (n < 1) throw ParameterError("sample_copula: n must be >= 1");
    const std::size_t d = static_cast<std::size_t>(spec.dim());
    UniformPanel panel(n, d);
    for_each_block(n, threads, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        Engine rng = make_stream(seed, b);
        for (std::size_t i = lo; i < hi; ++i) {
            const double log_v = sample_log_frailty(spec, rng);
            auto row = panel.row(i);
            for (std::size_t j = 0; j < d; ++j)
                row[j] = detail::psi_from_log_s(spec, std::log(standard_exponential(rng)) - log_v);
        }
    });
    return panel;
}

struct VarCvar {
    double var = 0.0;
    double cvar = 0.0;
    std::size_t exceedances = 0;
    double cvar_stderr = 0.0;
};

/// Inf-based empirical beta-quantile (first order statistic with ECDF >= beta).
inline double empirical_var(std::vector<double> z, double beta) {
    if (z.empty()) throw InsufficientSamplesError("empirical_var: no samples");
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("empirical_var: beta must lie in [0, 1)");
    const double n = static_cast<double>(z.size());
    auto k = static_cast<std::size_t>(std::ceil(n * beta - 1e-9));
    k = std::clamp<std::size_t>(k, 1, z.size());
    std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(k - 1), z.end());
    return z[k - 1];
}

/// VaR and CVaR of a loss sample; CVaR averages the losses strictly above VaR.
inline VarCvar loss_var_cvar(const std::vector<double>& z, double beta) {
    VarCvar out;
    out.var = empirical_var(z, beta);
    double sum = 0.0, sum2 = 0.0;
    for (double x : z)
        if (x > out.var) {
            sum += x;
            sum2 += x * x;
            ++out.exceedances;
        }
    if (out.exceedances == 0) throw InsufficientSamplesError("portfolio_var_cvar: no sample exceeds VaR");
    const double m = static_cast<double>(out.exceedances);
    out.cvar = sum / m;
    out.cvar_stderr = m > 1 ? std::sqrt(std::max(0.0, (sum2 - m * out.cvar * out.cvar) / (m - 1.0)) / m) : 0.0;
    return out;
}

/// Z_i = sum_j lambda_j F_j^{-1}(U_ij) for every panel row.
inline std::vector<double> portfolio_losses(const UniformPanel& panel, const PortfolioSpec& port) {
    port.validate();
    if (port.dim() != panel.dim()) throw DimensionError("portfolio_var_cvar: panel and portfolio dimensions differ");
    std::vector<double> z(panel.rows());
    for (std::size_t i = 0; i < panel.rows(); ++i) z[i] = port.loss(panel.row(i));
    return z;
}

/// VaR and CVaR of Z_i = sum_j lambda_j F_j^{-1}(U_ij).
inline VarCvar portfolio_var_cvar(const UniformPanel& panel, const PortfolioSpec& port, double beta) {
    return loss_var_cvar(portfolio_losses(panel, port), beta);
}

/// CSV with header u1,...,ud.
inline void write_panel_csv(const UniformPanel& panel, std::ostream& os) {
    for (std::size_t j = 0; j < panel.dim(); ++j) os << (j ? "," : "") << 'u' << (j + 1);
    os << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        for (std::size_t j = 0; j < panel.dim(); ++j) os << (j ? "," : "") << panel(i, j);
        os << '\n';
    }
}

} // namespace ccvar

#endif
