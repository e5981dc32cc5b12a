#ifndef CCVAR_QUADRATURE_HPP
#define CCVAR_QUADRATURE_HPP

// Globally adaptive Gauss-Kronrod integration. The 21-point Kronrod rule and its
// embedded Gauss error estimate come from Boost.Math; the subdivision strategy
// (always split the interval with the largest error) follows QUADPACK's QAG.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ccvar {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    bool converged = false;
};

struct QuadTolerance {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_subdivisions = 200;
};

namespace detail {

struct QuadInterval {
    double a, b, value, error;
};

template <class F>
QuadInterval gk21(F& f, double a, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
    // Boost 1.74 reports the non-adaptive error estimate on the reference interval [-1, 1]
    return {a, b, v, err * 0.5 * (b - a)};
}

} // namespace detail

/// Integrates f over the finite interval [a, b]. Never evaluates f at the endpoints.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadTolerance& tol = {}) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    const double sign = (b < a) ? -1.0 : 1.0;
    if (b < a) std::swap(a, b);

    auto by_error = [](const detail::QuadInterval& x, const detail::QuadInterval& y) {
        return x.error < y.error;
    };
    std::vector<detail::QuadInterval> heap;
    heap.push_back(detail::gk21(f, a, b));

    auto totals = [&heap]() {
        double v = 0.0, e = 0.0;
        for (const auto& iv : heap) {
            v += iv.value;
            e += iv.error;
        }
        return std::pair{v, e};
    };

    auto [value, error] = totals();
    while (error > std::max(tol.abs_tol, tol.rel_tol * std::abs(value)) &&
           static_cast<int>(heap.size()) < tol.max_subdivisions) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const auto worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // interval no longer divisible in double precision
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        heap.push_back(detail::gk21(f, worst.a, mid));
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(detail::gk21(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end(), by_error);
        std::tie(value, error) = totals();
    }
    out.value = sign * value;
    out.abs_error = error;
    out.intervals = static_cast<int>(heap.size());
    out.converged = error <= std::max(tol.abs_tol, tol.rel_tol * std::abs(value));
    return out;
}

/// Integrates over the whole real line through x = u / (1 - u^2), u in (-1, 1).
template <class F>
QuadResult integrate_real_line(F&& f, const QuadTolerance& tol = {}) {
    auto g = [&f](double u) {
        const double u2 = u * u;
        const double inv = 1.0 / (1.0 - u2);
        const double x = u * inv;
        const double jac = (1.0 + u2) * inv * inv;
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * jac;
    };
    return integrate(g, -1.0, 1.0, tol);
}

} // namespace ccvar

#endif
