#ifndef CCVAR_FIT_HPP
#define CCVAR_FIT_HPP

// Copula estimation on uniform panels: pseudo-observations, sample Kendall's
// tau, one-parameter maximum likelihood, and the upper-tail distance d_gamma.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ccvar/error.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/sampling.hpp"
#include "ccvar/special_functions.hpp"

namespace ccvar {

enum class FitMethod { IFM, PML };

inline std::string_view to_string(FitMethod m) { return m == FitMethod::IFM ? "IFM" : "PML"; }

struct CopulaFit {
    CopulaSpec spec = CopulaSpec::independence(2);
    double std_error = 0.0;
    double loglik = 0.0;
    FitMethod method = FitMethod::PML;
    double start_theta = 0.0;
    double start_loglik = 0.0;
    int evaluations = 0;
    bool boundary = false; // estimate within 1e-6 of the parameter range endpoint
    std::string warning;
};

/// Average ranks divided by (T + 1), column by column.
inline UniformPanel pseudo_observations(const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) throw DimensionError("pseudo_observations: no columns");
    const std::size_t T = columns[0].size();
    for (const auto& c : columns)
        if (c.size() != T) throw DimensionError("pseudo_observations: columns have different lengths");
    if (T == 0) throw DimensionError("pseudo_observations: empty columns");
    UniformPanel panel(T, columns.size());
    std::vector<std::size_t> idx(T);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c[a] < c[b]; });
        for (std::size_t k = 0; k < T;) {
            std::size_t e = k + 1;
            while (e < T && c[idx[e]] == c[idx[k]]) ++e;
            const double rank = 0.5 * static_cast<double>(k + 1 + e); // mean of ranks k+1 .. e
            for (std::size_t m = k; m < e; ++m) panel(idx[m], j) = rank / static_cast<double>(T + 1);
            k = e;
        }
    }
    return panel;
}

/// Kendall's tau-b by Knight's O(n log n) algorithm.
inline double sample_kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("sample_kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw InsufficientSamplesError("sample_kendall_tau: need at least two points");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    auto pairs = [](std::uint64_t k) { return k * (k - 1) / 2; };
    std::uint64_t tie_x = 0, tie_xy = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t e = i + 1;
        while (e < n && x[idx[e]] == x[idx[i]]) ++e;
        tie_x += pairs(e - i);
        for (std::size_t a = i; a < e;) {
            std::size_t b = a + 1;
            while (b < e && y[idx[b]] == y[idx[a]]) ++b;
            tie_xy += pairs(b - a);
            a = b;
        }
        i = e;
    }
    // merge sort y in x-order, counting discordant swaps
    std::vector<double> v(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = y[idx[i]];
    std::uint64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
            std::size_t a = lo, b = mid, k = lo;
            while (a < mid && b < hi) {
                if (v[b] < v[a]) {
                    swaps += mid - a;
                    buf[k++] = v[b++];
                } else {
                    buf[k++] = v[a++];
                }
            }
            while (a < mid) buf[k++] = v[a++];
            while (b < hi) buf[k++] = v[b++];
        }
        v.swap(buf);
    }
    std::uint64_t tie_y = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t e = i + 1;
        while (e < n && v[e] == v[i]) ++e;
        tie_y += pairs(e - i);
        i = e;
    }
    const double n0 = static_cast<double>(pairs(n));
    const double num = n0 - static_cast<double>(tie_x) - static_cast<double>(tie_y) + static_cast<double>(tie_xy) -
                       2.0 * static_cast<double>(swaps);
    const double den = std::sqrt((n0 - static_cast<double>(tie_x)) * (n0 - static_cast<double>(tie_y)));
    return den > 0.0 ? num / den : 0.0;
}

/// Mean of the pairwise sample taus over all column pairs.
inline double average_pairwise_tau(const UniformPanel& panel) {
    const std::size_t d = panel.dim();
    if (d < 2) throw DimensionError("average_pairwise_tau: need at least two columns");
    std::vector<std::vector<double>> cols(d);
    for (std::size_t j = 0; j < d; ++j) cols[j] = panel.column(j);
    double sum = 0.0;
    int count = 0;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            sum += sample_kendall_tau(cols[a], cols[b]);
            ++count;
        }
    return sum / count;
}

/// sum_i log c(u_i; theta), compensated summation in row order.
inline double copula_loglik(const CopulaSpec& spec, const UniformPanel& panel) {
    if (panel.dim() != static_cast<std::size_t>(spec.dim())) throw DimensionError("copula_loglik: dimension mismatch");
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < panel.rows(); ++i) acc.add(log_copula_density(spec, panel.row(i)));
    return acc.value();
}

namespace detail {

/// theta <-> unconstrained eta for the one-parameter search.
struct ThetaMap {
    Family family;
    double to_theta(double eta) const {
        switch (family) {
        case Family::Clayton:
        case Family::Frank: return std::exp(eta);
        case Family::Gumbel:
        case Family::Joe: return 1.0 + std::exp(eta);
        case Family::AMH: return 1.0 / (1.0 + std::exp(-eta));
        default: return 0.0;
        }
    }
    double to_eta(double theta) const {
        switch (family) {
        case Family::Clayton:
        case Family::Frank: return std::log(theta);
        case Family::Gumbel:
        case Family::Joe: return std::log(theta - 1.0);
        case Family::AMH: return std::log(theta / (1.0 - theta));
        default: return 0.0;
        }
    }
    double eta_min() const { return family == Family::AMH ? -20.0 : std::log(1e-8); }
    double eta_max() const { return family == Family::AMH ? 20.0 : std::log(1e3); }
    double lower_endpoint() const { return (family == Family::Gumbel || family == Family::Joe) ? 1.0 : 0.0; }
    double upper_endpoint() const { return family == Family::AMH ? 1.0 : std::numeric_limits<double>::infinity(); }
};

inline double start_theta(Family f, double tau) {
    const auto r = attainable_tau(f);
    const double hi = r.hi - 1e-3;
    tau = std::min(tau, hi);
    if (tau <= 1e-3) {
        switch (f) {
        case Family::Clayton: return 0.05;
        case Family::Frank: return 0.05;
        case Family::Gumbel: return 1.02;
        case Family::Joe: return 1.02;
        case Family::AMH: return 0.05;
        default: return 0.0;
        }
    }
    return tau_inverse(f, tau);
}

} // namespace detail

/// Maximum likelihood over the family range by a bounded Brent search on a
/// transformed parameter, started from the inverse of the average sample tau.
inline CopulaFit fit_copula_mle(const UniformPanel& panel, Family family, FitMethod method = FitMethod::PML) {
    if (family == Family::Independence) throw ParameterError("fit_copula_mle: independence has no parameter");
    if (panel.dim() < 2 || panel.dim() > static_cast<std::size_t>(kMaxDim))
        throw DimensionError("fit_copula_mle: panel dimension out of range");
    panel.validate();
    const int d = static_cast<int>(panel.dim());
    const detail::ThetaMap map{family};
    CopulaFit out;
    out.spec = CopulaSpec(family, detail::start_theta(family, average_pairwise_tau(panel)), d);
    out.method = method;
    out.start_theta = out.spec.theta();
    out.start_loglik = copula_loglik(out.spec, panel);

    int evals = 0;
    auto negll = [&](double eta) {
        ++evals;
        try {
            const double v = -copula_loglik(CopulaSpec(family, map.to_theta(eta), d), panel);
            return std::isfinite(v) ? v : 1e300;
        } catch (const ParameterError&) {
            return 1e300;
        }
    };
    const double eta0 = std::clamp(map.to_eta(out.start_theta), map.eta_min(), map.eta_max());
    // bracket around the start, widened while the minimum sits on an edge
    double lo = std::max(map.eta_min(), eta0 - 1.5), hi = std::min(map.eta_max(), eta0 + 1.5);
    std::pair<double, double> best;
    for (int pass = 0;; ++pass) {
        std::uintmax_t iters = 200;
        best = boost::math::tools::brent_find_minima(negll, lo, hi, 40, iters);
        const double span = hi - lo;
        const bool at_lo = best.first - lo < 1e-3 * span && lo > map.eta_min();
        const bool at_hi = hi - best.first < 1e-3 * span && hi < map.eta_max();
        if ((!at_lo && !at_hi) || pass > 6) break;
        if (at_lo) lo = std::max(map.eta_min(), lo - 3.0 * span);
        if (at_hi) hi = std::min(map.eta_max(), hi + 3.0 * span);
    }
    const double theta = map.to_theta(best.first);
    out.spec = CopulaSpec(family, theta, d);
    out.loglik = copula_loglik(out.spec, panel);
    if (!std::isfinite(out.loglik))
        throw DomainError("fit_copula_mle: a panel row hits a density singularity at the estimate");
    if (out.loglik < out.start_loglik) {
        out.spec = CopulaSpec(family, out.start_theta, d);
        out.loglik = out.start_loglik;
    }
    out.evaluations = evals;

    const double th = out.spec.theta();
    const double lo_end = map.lower_endpoint(), hi_end = map.upper_endpoint();
    if (th - lo_end < 1e-6 || hi_end - th < 1e-6) {
        out.boundary = true;
        out.warning = std::string(to_string(family)) + ": estimate " + std::to_string(th) +
                      " lies on the boundary of the parameter range";
    }
    // observed information by central differences, kept inside the range
    double h = 1e-4 * std::max(1.0, th);
    h = std::min({h, 0.5 * (th - lo_end), 0.5 * (hi_end - th)});
    if (h > 0.0) {
        auto ll = [&](double t) { return copula_loglik(CopulaSpec(family, t, d), panel); };
        const double d2 = (ll(th + h) - 2.0 * out.loglik + ll(th - h)) / (h * h);
        out.std_error = d2 < 0.0 ? 1.0 / std::sqrt(-d2) : std::numeric_limits<double>::quiet_NaN();
    } else {
        out.std_error = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

// ---------------------------------------------------------------------------
// upper-tail distance

inline constexpr int kTailLatticePoints = 5;
inline constexpr std::size_t kTailLatticeMax = 10000;

/// Indices (base kTailLatticePoints) of the lattice points on [gamma, 1]^d that are used;
/// every stride-th point when the full lattice exceeds kTailLatticeMax.
inline std::vector<std::size_t> tail_lattice_indices(int d) {
    const auto total = static_cast<std::size_t>(std::pow(kTailLatticePoints, d) + 0.5);
    const std::size_t stride = (total + kTailLatticeMax - 1) / kTailLatticeMax;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < total; k += stride) out.push_back(k);
    return out;
}

inline std::vector<double> tail_lattice_point(std::size_t index, int d, double gamma) {
    std::vector<double> w(d);
    for (int j = 0; j < d; ++j) {
        const int k = static_cast<int>(index % kTailLatticePoints);
        index /= kTailLatticePoints;
        w[j] = k == kTailLatticePoints - 1 ? 1.0 : gamma + (1.0 - gamma) * k / (kTailLatticePoints - 1);
    }
    return w;
}

/// Empirical copula (1/n) #{i : u_i <= w} at every lattice point, by cell counting
/// followed by cumulative sums along each axis.
inline std::vector<double> empirical_copula_on_lattice(const UniformPanel& panel, double gamma) {
    const int d = static_cast<int>(panel.dim());
    const int m = kTailLatticePoints;
    const auto total = static_cast<std::size_t>(std::pow(m, d) + 0.5);
    std::vector<double> counts(total, 0.0);
    std::vector<double> grid(m);
    for (int k = 0; k < m; ++k) grid[k] = k == m - 1 ? 1.0 : gamma + (1.0 - gamma) * k / (m - 1);
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        std::size_t cell = 0, mult = 1;
        bool inside = true;
        for (int j = 0; j < d; ++j) {
            const double u = panel(i, j);
            const int k = static_cast<int>(std::lower_bound(grid.begin(), grid.end(), u) - grid.begin());
            if (k >= m) {
                inside = false;
                break;
            }
            cell += static_cast<std::size_t>(k) * mult;
            mult *= m;
        }
        if (inside) counts[cell] += 1.0;
    }
    std::size_t stride = 1;
    for (int j = 0; j < d; ++j) {
        for (std::size_t c = 0; c < total; ++c)
            if ((c / stride) % m != 0) counts[c] += counts[c - stride];
        stride *= m;
    }
    for (auto& c : counts) c /= static_cast<double>(panel.rows());
    return counts;
}

/// Mean |C_hat(w) - C_fitted(w)| over the lattice on [gamma, 1]^d.
inline double gof_tail_distance(const UniformPanel& panel, const CopulaSpec& fitted, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gof_tail_distance: gamma must lie in (0, 1)");
    if (panel.dim() != static_cast<std::size_t>(fitted.dim())) throw DimensionError("gof_tail_distance: dimension mismatch");
    const int d = fitted.dim();
    const auto emp = empirical_copula_on_lattice(panel, gamma);
    const auto idx = tail_lattice_indices(d);
    double sum = 0.0;
    for (auto k : idx) sum += std::abs(emp[k] - copula_cdf(fitted, tail_lattice_point(k, d, gamma)));
    return sum / static_cast<double>(idx.size());
}

} // namespace ccvar

#endif
