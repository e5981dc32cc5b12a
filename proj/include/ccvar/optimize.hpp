#ifndef CCVAR_OPTIMIZE_HPP
#define CCVAR_OPTIMIZE_HPP

// Thin wrappers over GSL multimin (BFGS with finite-difference gradients,
// Nelder-Mead simplex) and finite-difference derivatives.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

namespace ccvar {

using Objective = std::function<double(std::span<const double>)>;

struct MinimizeResult {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

struct BfgsOptions {
    int max_iter = 400;
    double grad_tol = 1e-6;
    double initial_step = 0.01;
    double line_tol = 0.1;
    double fd_step = 1e-5;
};

struct SimplexOptions {
    int max_iter = 3000;
    double size_tol = 1e-9;
    double initial_step = 0.05;
};

namespace detail {

/// Penalized evaluation so a line search never sees NaN.
inline double safe_eval(const Objective& f, std::span<const double> x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 1e100;
}

inline std::vector<double> to_vec(const gsl_vector* v) {
    std::vector<double> out(v->size);
    for (std::size_t i = 0; i < v->size; ++i) out[i] = gsl_vector_get(v, i);
    return out;
}

struct GslContext {
    const Objective* f;
    double fd_step;
};

inline void central_gradient(const Objective& f, std::vector<double> x, double h, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double step = h * std::max(1.0, std::abs(xi));
        x[i] = xi + step;
        const double fp = safe_eval(f, x);
        x[i] = xi - step;
        const double fm = safe_eval(f, x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * step);
    }
}

inline double gsl_f(const gsl_vector* v, void* params) {
    auto* ctx = static_cast<GslContext*>(params);
    return safe_eval(*ctx->f, to_vec(v));
}

inline void gsl_df(const gsl_vector* v, void* params, gsl_vector* g) {
    auto* ctx = static_cast<GslContext*>(params);
    std::vector<double> grad(v->size);
    central_gradient(*ctx->f, to_vec(v), ctx->fd_step, grad);
    for (std::size_t i = 0; i < v->size; ++i) gsl_vector_set(g, i, grad[i]);
}

inline void gsl_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* g) {
    *f = gsl_f(v, params);
    gsl_df(v, params, g);
}

struct GslErrorGuard {
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    ~GslErrorGuard() { gsl_set_error_handler(old); }
};

} // namespace detail

/// Central-difference gradient with relative step h.
inline std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x, double h = 1e-5) {
    std::vector<double> g(x.size());
    detail::central_gradient(f, x, h, g);
    return g;
}

/// Central-difference Hessian with relative step h.
inline Eigen::MatrixXd numeric_hessian(const Objective& f, const std::vector<double>& x, double h = 1e-4) {
    const std::size_t n = x.size();
    Eigen::MatrixXd H(n, n);
    std::vector<double> y = x;
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = h * std::max(1.0, std::abs(x[i]));
    const double f0 = f(x);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] + step[i];
        const double fp = f(y);
        y[i] = x[i] - step[i];
        const double fm = f(y);
        y[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
        for (std::size_t j = 0; j < i; ++j) {
            double acc = 0.0;
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    y[i] = x[i] + si * step[i];
                    y[j] = x[j] + sj * step[j];
                    acc += si * sj * f(y);
                }
            y[i] = x[i];
            y[j] = x[j];
            H(i, j) = H(j, i) = acc / (4.0 * step[i] * step[j]);
        }
    }
    return H;
}

/// Quasi-Newton (GSL vector_bfgs2) with finite-difference gradients.
inline MinimizeResult minimize_bfgs(const Objective& f, const std::vector<double>& x0, const BfgsOptions& opt = {}) {
    detail::GslErrorGuard guard;
    const std::size_t n = x0.size();
    detail::GslContext ctx{&f, opt.fd_step};
    gsl_multimin_function_fdf fn{&detail::gsl_f, &detail::gsl_df, &detail::gsl_fdf, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0[i]);
    gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(s, &fn, x, opt.initial_step, opt.line_tol);
    MinimizeResult out;
    int status = GSL_CONTINUE;
    for (out.iterations = 0; out.iterations < opt.max_iter && status == GSL_CONTINUE; ++out.iterations) {
        if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
        status = gsl_multimin_test_gradient(s->gradient, opt.grad_tol);
    }
    out.converged = status == GSL_SUCCESS;
    out.x = detail::to_vec(s->x);
    out.fx = s->f;
    gsl_multimin_fdfminimizer_free(s);
    gsl_vector_free(x);
    return out;
}

/// Nelder-Mead (GSL nmsimplex2).
inline MinimizeResult minimize_simplex(const Objective& f, const std::vector<double>& x0,
                                       const SimplexOptions& opt = {}) {
    detail::GslErrorGuard guard;
    const std::size_t n = x0.size();
    detail::GslContext ctx{&f, 0.0};
    gsl_multimin_function fn{&detail::gsl_f, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x, i, x0[i]);
        gsl_vector_set(step, i, opt.initial_step * std::max(1.0, std::abs(x0[i])));
    }
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    MinimizeResult out;
    int status = GSL_CONTINUE;
    for (out.iterations = 0; out.iterations < opt.max_iter && status == GSL_CONTINUE; ++out.iterations) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.size_tol);
    }
    out.converged = status == GSL_SUCCESS;
    out.x = detail::to_vec(s->x);
    out.fx = s->fval;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return out;
}

} // namespace ccvar

#endif
