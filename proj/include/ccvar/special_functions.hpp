#ifndef CCVAR_SPECIAL_FUNCTIONS_HPP
#define CCVAR_SPECIAL_FUNCTIONS_HPP

// Combinatorial and special functions needed by the Archimedean generator
// derivatives: Stirling numbers, polylogarithms of non-positive integer order,
// and the polynomial coefficients of the Gumbel and Joe derivative formulas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ccvar/error.hpp"

namespace ccvar {

/// Largest row index supported by the exact (int64) Stirling tables.
inline constexpr int kMaxStirlingIndex = 21;

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("stirling: int64 overflow");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("stirling: int64 overflow");
    return r;
}

inline void check_stirling_index(int n, int k) {
    if (n < 0 || k < 0 || n > kMaxStirlingIndex)
        throw IndexError("stirling: indices must satisfy 0 <= n <= " +
                         std::to_string(kMaxStirlingIndex) + ", k >= 0 (got n=" +
                         std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

/// Numerically safe log(sum(exp(x_i))).
inline double log_sum_exp(std::span<const double> xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace detail

/// Signed Stirling numbers of the first kind s(n, k):
/// x(x-1)...(x-n+1) = sum_k s(n,k) x^k.
inline std::int64_t stirling_first(int n, int k) {
    detail::check_stirling_index(n, k);
    if (k > n) return 0;
    std::vector<std::int64_t> row(n + 1, 0), next(n + 1, 0);
    row[0] = 1;
    for (int m = 1; m <= n; ++m) {
        std::fill(next.begin(), next.end(), 0);
        for (int j = 1; j <= m; ++j)
            next[j] = detail::checked_add(row[j - 1], detail::checked_mul(-(m - 1), row[j]));
        row.swap(next);
    }
    return row[k];
}

/// Stirling numbers of the second kind S(n, k).
inline std::int64_t stirling_second(int n, int k) {
    detail::check_stirling_index(n, k);
    if (k > n) return 0;
    std::vector<std::int64_t> row(n + 1, 0), next(n + 1, 0);
    row[0] = 1;
    for (int m = 1; m <= n; ++m) {
        std::fill(next.begin(), next.end(), 0);
        for (int j = 1; j <= m; ++j)
            next[j] = detail::checked_add(detail::checked_mul(j, row[j]), row[j - 1]);
        row.swap(next);
    }
    return row[k];
}

/// Li_{-n}(z) for integer n >= 0 and z in (-1, 1), as the exact rational function
/// N_n(z) / (1-z)^{n+1}. N_0(z) = z and N_{n+1} comes from applying z d/dz once more.
inline double polylog_negint(int n, double z) {
    if (n < 0 || n > 20) throw IndexError("polylog_negint: order n must lie in [0, 20]");
    if (!(z > -1.0 && z < 1.0)) throw DomainError("polylog_negint: z must lie in (-1, 1)");
    // numerator coefficients, index = power of z
    std::vector<std::int64_t> num{0, 1};
    for (int m = 0; m < n; ++m) {
        // z * [ (1-z) N'(z) + (m+1) N(z) ]
        const std::size_t deg = num.size() - 1;
        std::vector<std::int64_t> inner(deg + 1, 0);
        for (std::size_t p = 1; p <= deg; ++p) {
            const auto dp = detail::checked_mul(static_cast<std::int64_t>(p), num[p]);
            inner[p - 1] = detail::checked_add(inner[p - 1], dp);
            inner[p] = detail::checked_add(inner[p], -dp);
        }
        for (std::size_t p = 0; p <= deg; ++p)
            inner[p] = detail::checked_add(inner[p], detail::checked_mul(m + 1, num[p]));
        num.assign(deg + 2, 0);
        for (std::size_t p = 0; p <= deg; ++p) num[p + 1] = inner[p];
    }
    double acc = 0.0;
    for (auto it = num.rbegin(); it != num.rend(); ++it) acc = acc * z + static_cast<double>(*it);
    return acc / std::pow(1.0 - z, n + 1);
}

/// Gumbel polynomial coefficient a^G_{ik}(theta), Stirling-number form with alpha = 1/theta:
/// (-1)^{i-k} sum_{j=k}^{i} alpha^j s(i,j) S(j,k).
inline double gumbel_poly_coeff(int i, int k, double theta) {
    if (i < 1 || k < 1 || k > i) throw IndexError("gumbel_poly_coeff: need 1 <= k <= i");
    if (!(theta >= 1.0)) throw ParameterError("gumbel_poly_coeff: theta must be >= 1");
    const double alpha = 1.0 / theta;
    long double acc = 0.0L;
    for (int j = k; j <= i; ++j)
        acc += std::pow(static_cast<long double>(alpha), j) *
               static_cast<long double>(stirling_first(i, j)) *
               static_cast<long double>(stirling_second(j, k));
    return static_cast<double>(((i - k) % 2 == 0) ? acc : -acc);
}

/// Joe polynomial coefficient a^J_{ik}(theta) = S(i,k) (1-alpha)(2-alpha)...(k-1-alpha),
/// alpha = 1/theta; equals S(i,k) Gamma(k-alpha)/Gamma(1-alpha) when theta > 1.
inline double joe_poly_coeff(int i, int k, double theta) {
    if (i < 1 || k < 1 || k > i) throw IndexError("joe_poly_coeff: need 1 <= k <= i");
    if (!(theta >= 1.0)) throw ParameterError("joe_poly_coeff: theta must be >= 1");
    const double alpha = 1.0 / theta;
    double poch = 1.0;
    for (int j = 1; j <= k - 1; ++j) poch *= (j - alpha);
    return static_cast<double>(stirling_second(i, k)) * poch;
}

} // namespace ccvar

#endif
