#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ccvar/generators.hpp"
#include "ccvar/quadrature.hpp"
#include "ccvar/sampling.hpp"
#include "ccvar/special_functions.hpp"
#include "oracles.hpp"

using namespace ccvar;

namespace {

struct Case {
    Family family;
    double theta;
};

std::vector<Case> theta_grid() {
    return {{Family::Clayton, 0.3}, {Family::Clayton, 2.0},  {Family::Clayton, 12.0}, {Family::Frank, 0.5},
            {Family::Frank, 5.0},   {Family::Frank, 25.0},   {Family::Gumbel, 1.0},   {Family::Gumbel, 1.57},
            {Family::Gumbel, 6.0},  {Family::Joe, 1.0},      {Family::Joe, 2.0},      {Family::Joe, 8.0},
            {Family::AMH, 0.0},     {Family::AMH, 0.5},      {Family::AMH, 0.95},     {Family::Independence, 0.0}};
}

std::string label(const Case& c) { return std::string(to_string(c.family)) + " theta=" + std::to_string(c.theta); }

} // namespace

TEST(Phi, DocumentedValues) {
    EXPECT_NEAR(phi(CopulaSpec(Family::Clayton, 2.0, 2), 0.5), 3.0, 1e-14);
    EXPECT_NEAR(phi(CopulaSpec::independence(2), 0.5), 0.6931472, 1e-7);
    for (const auto& c : theta_grid()) EXPECT_EQ(phi(CopulaSpec(c.family, c.theta, 2), 1.0), 0.0) << label(c);
}

TEST(Phi, MatchesTextbookFormulas) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 3);
        if (c.family == Family::AMH && c.theta == 0.0) continue;
        for (double t : {0.01, 0.2, 0.5, 0.9, 0.999}) {
            const double want = oracle::phi(c.family, c.theta, t);
            EXPECT_NEAR(phi(spec, t), want, 1e-12 * std::max(1.0, want)) << label(c) << " t=" << t;
        }
        for (double s : {0.01, 0.5, 2.0, 10.0})
            EXPECT_NEAR(phi_inv(spec, s), oracle::psi(c.family, c.theta, s), 1e-13) << label(c) << " s=" << s;
    }
}

TEST(Phi, DecreasingAndConvex) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        double prev = phi(spec, 0.01), prev_slope = phi_prime(spec, 0.01);
        for (double t = 0.02; t < 0.995; t += 0.01) {
            const double v = phi(spec, t), s = phi_prime(spec, t);
            EXPECT_LT(v, prev) << label(c) << " t=" << t;
            EXPECT_LT(s, 0.0) << label(c);
            EXPECT_GE(s, prev_slope - 1e-12 * std::abs(prev_slope)) << label(c) << " t=" << t;
            prev = v;
            prev_slope = s;
        }
    }
}

TEST(PhiPrime, DocumentedValues) {
    EXPECT_NEAR(phi_prime(CopulaSpec::independence(2), 0.5), -2.0, 1e-14);
    EXPECT_NEAR(phi_prime(CopulaSpec(Family::Clayton, 1.0, 2), 0.5), -4.0, 1e-13);
    EXPECT_NEAR(phi_prime(CopulaSpec(Family::Gumbel, 1.0, 2), std::exp(-1.0)), -std::numbers::e, 1e-13);
}

TEST(PhiPrime, MatchesCentralDifferences) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        if (c.family == Family::AMH && c.theta == 0.0) continue;
        for (double t : {0.1, 0.4, 0.7, 0.95}) {
            if (oracle::phi(c.family, c.theta, t) < 1e-6) continue; // oracle too coarse to difference
            const double h = 1e-6;
            const double fd = (oracle::phi(c.family, c.theta, t + h) - oracle::phi(c.family, c.theta, t - h)) / (2 * h);
            EXPECT_NEAR(phi_prime(spec, t), fd, 1e-6 * std::abs(fd)) << label(c) << " t=" << t;
            EXPECT_NEAR(log_neg_phi_prime(spec, t), std::log(-fd), 1e-6) << label(c);
        }
    }
}

TEST(PhiInv, DocumentedValues) {
    for (const auto& c : theta_grid()) EXPECT_EQ(phi_inv(CopulaSpec(c.family, c.theta, 2), 0.0), 1.0);
    EXPECT_NEAR(phi_inv(CopulaSpec::independence(2), std::log(2.0)), 0.5, 1e-15);
    EXPECT_NEAR(phi_inv(CopulaSpec(Family::Clayton, 2.0, 2), 3.0), 0.5, 1e-15);
}

TEST(PhiInv, RoundTripOnFineGrid) {
    std::vector<double> ts{1e-6, 1e-5, 1e-4, 1e-3};
    for (double t = 0.01; t < 1.0; t += 0.01) ts.push_back(t);
    for (double t : {0.999, 0.9999, 1.0 - 1e-5, 1.0 - 1e-6}) ts.push_back(t);
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        for (double t : ts) EXPECT_NEAR(phi_inv(spec, phi(spec, t)), t, 1e-12) << label(c) << " t=" << t;
    }
}

TEST(PhiInv, DecreasingInS) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        double prev = 1.0;
        for (double s = 0.05; s < 20.0; s *= 1.3) {
            const double v = phi_inv(spec, s);
            EXPECT_LT(v, prev) << label(c) << " s=" << s;
            prev = v;
        }
    }
}

TEST(FAux, DocumentedValues) {
    EXPECT_NEAR(f_aux(CopulaSpec::independence(3), 2, 0.3), -0.3, 1e-15);
    EXPECT_NEAR(f_aux(CopulaSpec(Family::Clayton, 1.0, 2), 0, 0.5), -0.25, 1e-15);
    EXPECT_NEAR(f_aux(CopulaSpec(Family::Clayton, 0.5, 2), 1, 0.5), 1.5, 1e-13);
}

TEST(FAux, IndependenceAlternatesAtT) {
    const auto spec = CopulaSpec::independence(7);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(f_aux(spec, i, 0.37), (i % 2 ? 1.0 : -1.0) * 0.37, 1e-15);
}

TEST(FAux, MatchesFiniteDifferencesOfInverseGenerator) {
    for (const auto& c : theta_grid()) {
        if (c.family == Family::Independence || (c.family == Family::AMH && c.theta == 0.0)) continue;
        const CopulaSpec spec(c.family, c.theta, 4);
        for (double t : {0.2, 0.5, 0.8}) {
            const double s = phi(spec, t);
            for (int i = 0; i < 4; ++i) {
                const double h = std::min(0.2 * (1.0 + s), 0.4 * s / (i + 1));
                const double fd = oracle::psi_derivative_fd(c.family, c.theta, i + 1, s, h);
                EXPECT_NEAR(f_aux(spec, i, t), fd, 1e-5 * std::abs(fd)) << label(c) << " t=" << t << " i=" << i;
            }
        }
    }
}

TEST(FAux, SignAlternationUpToDimension) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 7);
        for (double t : {0.05, 0.3, 0.6, 0.9, 0.99})
            for (int i = 0; i < 7; ++i) {
                const double v = f_aux(spec, i, t);
                EXPECT_GT((i % 2 ? 1.0 : -1.0) * v, 0.0) << label(c) << " t=" << t << " i=" << i;
            }
    }
}

TEST(FAux, OrderOutOfRange) {
    const CopulaSpec spec(Family::Gumbel, 2.0, 3);
    EXPECT_THROW(f_aux(spec, 3, 0.5), IndexError);
    EXPECT_THROW(f_aux(spec, -1, 0.5), IndexError);
    EXPECT_THROW(f_aux(spec, 0, 1.0), DomainError);
}

TEST(KendallTau, DocumentedValues) {
    EXPECT_NEAR(kendall_tau(CopulaSpec(Family::Clayton, 2.0, 2)), 0.5, 1e-15);
    EXPECT_NEAR(kendall_tau(CopulaSpec(Family::Gumbel, 2.0, 2)), 0.5, 1e-15);
    EXPECT_NEAR(kendall_tau(CopulaSpec(Family::Frank, 1.0, 2)), 0.11002, 1e-5);
}

TEST(KendallTau, MatchesIndependentFormulas) {
    for (const auto& c : theta_grid()) {
        const double got = kendall_tau(CopulaSpec(c.family, c.theta, 2));
        EXPECT_NEAR(got, oracle::kendall_tau(c.family, c.theta), 1e-10) << label(c);
    }
}

TEST(KendallTau, MonotoneInTheta) {
    for (Family f : kArchimedeanFamilies) {
        const auto r = attainable_tau(f);
        double prev = -1.0;
        for (double tau = 0.01; tau < r.hi - 0.005; tau += 0.01) {
            const double th = tau_inverse(f, tau);
            const double back = kendall_tau(CopulaSpec(f, th, 2));
            EXPECT_GT(th, prev);
            EXPECT_NEAR(back, tau, 1e-8) << to_string(f) << " tau=" << tau;
            prev = th;
        }
    }
}

TEST(TauInverse, DocumentedValues) {
    EXPECT_NEAR(tau_inverse(Family::Clayton, 0.5), 2.0, 1e-14);
    EXPECT_NEAR(tau_inverse(Family::Gumbel, 0.5), 2.0, 1e-14);
    EXPECT_NEAR(tau_inverse(Family::Frank, 0.11002), 1.0, 1e-4);
    const double tau1 = kendall_tau(CopulaSpec(Family::Frank, 1.0, 2));
    EXPECT_NEAR(tau_inverse(Family::Frank, tau1), 1.0, 1e-6);
}

TEST(TauInverse, UnattainableTauNamesInterval) {
    try {
        tau_inverse(Family::AMH, 0.4);
        FAIL() << "expected ParameterError";
    } catch (const ParameterError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("[0.000000, 0.333333)"), std::string::npos) << msg;
    }
    EXPECT_THROW(tau_inverse(Family::Clayton, -0.1), ParameterError);
    EXPECT_THROW(tau_inverse(Family::Gumbel, 1.0), ParameterError);
}

TEST(TailDependence, DocumentedValues) {
    const auto c = tail_dependence(CopulaSpec(Family::Clayton, 1.0, 2));
    EXPECT_NEAR(c.lambda_lower, 0.5, 1e-15);
    EXPECT_EQ(c.lambda_upper, 0.0);
    const auto g = tail_dependence(CopulaSpec(Family::Gumbel, 2.0, 2));
    EXPECT_EQ(g.lambda_lower, 0.0);
    EXPECT_NEAR(g.lambda_upper, 2.0 - std::sqrt(2.0), 1e-15);
    for (double th : {0.5, 5.0, 50.0}) {
        const auto f = tail_dependence(CopulaSpec(Family::Frank, th, 2));
        EXPECT_EQ(f.lambda_lower, 0.0);
        EXPECT_EQ(f.lambda_upper, 0.0);
    }
}

TEST(TailDependence, MatchesOracleAndDiagonalLimit) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        const auto tc = tail_dependence(spec);
        EXPECT_NEAR(tc.lambda_lower, oracle::lower_tail(c.family, c.theta), 1e-15);
        EXPECT_NEAR(tc.lambda_upper, oracle::upper_tail(c.family, c.theta), 1e-15);
        EXPECT_GE(tc.lambda_lower, 0.0);
        EXPECT_LE(tc.lambda_upper, 1.0);
        // C(u,u)/u at small u and (1 - 2u + C(u,u))/(1-u) near 1 approach the coefficients.
        // Clayton's generator overflows far sooner than the others.
        const double lo = c.family == Family::Clayton ? 1e-12 : 1e-200, hi = 1.0 - 1e-7;
        const std::array<double, 2> a{lo, lo}, b{hi, hi};
        if (c.family != Family::Frank && c.family != Family::AMH) {
            EXPECT_NEAR(copula_cdf(spec, a) / lo, tc.lambda_lower, 2e-2) << label(c);
            EXPECT_NEAR((1.0 - 2.0 * hi + copula_cdf(spec, b)) / (1.0 - hi), tc.lambda_upper, 2e-2) << label(c);
        }
    }
}

TEST(CopulaCdf, DocumentedValues) {
    const std::array<double, 2> half{0.5, 0.5};
    EXPECT_NEAR(copula_cdf(CopulaSpec(Family::Clayton, 1.0, 2), half), 1.0 / 3.0, 1e-15);
    const std::array<double, 3> u{0.5, 0.4, 0.5};
    EXPECT_NEAR(copula_cdf(CopulaSpec::independence(3), u), 0.1, 1e-15);
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 4);
        const std::array<double, 4> v{1.0, 1.0, 1.0, 0.37};
        EXPECT_NEAR(copula_cdf(spec, v), 0.37, 1e-14) << label(c);
        const std::array<double, 4> z{0.3, 0.0, 0.9, 0.5};
        EXPECT_EQ(copula_cdf(spec, z), 0.0);
    }
}

TEST(CopulaCdf, MatchesOracleComposition) {
    const std::array<double, 3> u{0.3, 0.8, 0.55};
    for (const auto& c : theta_grid()) {
        if (c.family == Family::AMH && c.theta == 0.0) continue;
        EXPECT_NEAR(copula_cdf(CopulaSpec(c.family, c.theta, 3), u), oracle::copula_cdf(c.family, c.theta, u), 1e-13)
            << label(c);
    }
}

TEST(CopulaCdf, Errors) {
    const CopulaSpec spec(Family::Joe, 2.0, 3);
    const std::array<double, 2> two{0.5, 0.5};
    EXPECT_THROW(copula_cdf(spec, two), DimensionError);
    const std::array<double, 3> bad{0.5, 1.2, 0.5};
    EXPECT_THROW(copula_cdf(spec, bad), DomainError);
}

TEST(CopulaDensity, DocumentedValues) {
    const std::array<double, 2> half{0.5, 0.5};
    EXPECT_NEAR(copula_density(CopulaSpec(Family::Clayton, 1.0, 2), half), 32.0 / 27.0, 1e-13);
    const std::array<double, 4> u{0.1, 0.7, 0.4, 0.99};
    EXPECT_NEAR(copula_density(CopulaSpec::independence(4), u), 1.0, 1e-13);
}

TEST(CopulaDensity, MixedDifferenceOfCdf) {
    for (const auto& c : theta_grid()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        for (double a : {0.2, 0.5, 0.8})
            for (double b : {0.3, 0.6, 0.9}) {
                const double h = 1e-4;
                auto C = [&](double x, double y) {
                    const std::array<double, 2> u{x, y};
                    return copula_cdf(spec, u);
                };
                const double fd = (C(a + h, b + h) - C(a + h, b - h) - C(a - h, b + h) + C(a - h, b - h)) / (4 * h * h);
                const std::array<double, 2> u{a, b};
                const double dens = copula_density(spec, u);
                EXPECT_NEAR(dens, fd, 1e-4 * std::max(1.0, dens)) << label(c) << " u=(" << a << "," << b << ")";
                EXPECT_GE(dens, 0.0);
            }
    }
}

TEST(CopulaDensity, IntegratesToOne) {
    const std::vector<Case> cases{{Family::Clayton, 1.0}, {Family::Frank, 5.0},  {Family::Gumbel, 1.5},
                                  {Family::Joe, 2.0},     {Family::AMH, 0.7}};
    for (const auto& c : cases) {
        const CopulaSpec spec(c.family, c.theta, 2);
        const QuadTolerance tol{1e-10, 1e-10, 1000};
        auto inner = [&](double x) {
            return integrate(
                       [&](double y) {
                           const std::array<double, 2> u{x, y};
                           return copula_density(spec, u);
                       },
                       0.0, 1.0, tol)
                .value;
        };
        const auto r = integrate(inner, 0.0, 1.0, tol);
        EXPECT_NEAR(r.value, 1.0, 1e-6) << label(c);
    }
}

TEST(CopulaDensity, BoundaryIsDomainError) {
    const CopulaSpec spec(Family::Clayton, 2.0, 2);
    const std::array<double, 2> u{0.0, 0.5};
    EXPECT_THROW(copula_density(spec, u), DomainError);
}

TEST(CopulaSpec, ParameterRanges) {
    EXPECT_THROW(CopulaSpec(Family::Clayton, 0.0, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::Clayton, -0.5, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::Frank, -1.0, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::Gumbel, 0.99, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::Joe, 0.5, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::AMH, 1.0, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::AMH, -0.2, 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::Gumbel, std::nan(""), 2), ParameterError);
    EXPECT_THROW(CopulaSpec(Family::Gumbel, 2.0, 1), IndexError);
    EXPECT_NO_THROW(CopulaSpec(Family::AMH, 0.0, 2));
    EXPECT_NO_THROW(CopulaSpec(Family::Gumbel, 1.0, 2));
}

TEST(CopulaSpec, GeneratorDomainErrors) {
    const CopulaSpec spec(Family::Frank, 3.0, 2);
    EXPECT_THROW(phi(spec, 0.0), DomainError);
    EXPECT_THROW(phi(spec, 1.1), DomainError);
    EXPECT_THROW(phi_prime(spec, 1.0), DomainError);
    EXPECT_THROW(phi_inv(spec, -1e-3), DomainError);
}

TEST(SpecialFunctions, StirlingNumbers) {
    EXPECT_EQ(stirling_second(3, 2), 3);
    EXPECT_EQ(stirling_first(3, 2), -3);
    // Falling factorial x(x-1)...(x-n+1) = sum_k s(n,k) x^k.
    for (int n = 1; n <= 12; ++n) {
        std::vector<long long> poly{1};
        for (int m = 0; m < n; ++m) {
            std::vector<long long> next(poly.size() + 1, 0);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += poly[k];
                next[k] -= m * poly[k];
            }
            poly = next;
        }
        for (int k = 0; k <= n; ++k) EXPECT_EQ(stirling_first(n, k), poly[k]) << n << "," << k;
    }
    // S(n,k) = (1/k!) sum_j (-1)^j C(k,j) (k-j)^n.
    for (int n = 1; n <= 12; ++n)
        for (int k = 1; k <= n; ++k) {
            double s = 0.0, binom = 1.0, fact = 1.0;
            for (int j = 0; j <= k; ++j) {
                s += (j % 2 ? -1.0 : 1.0) * binom * std::pow(k - j, n);
                binom = binom * (k - j) / (j + 1);
            }
            for (int j = 2; j <= k; ++j) fact *= j;
            EXPECT_EQ(stirling_second(n, k), std::llround(s / fact)) << n << "," << k;
        }
    EXPECT_THROW(stirling_second(-1, 0), IndexError);
}

TEST(SpecialFunctions, PolylogNegativeIntegerOrder) {
    EXPECT_NEAR(polylog_negint(0, 0.5), 1.0, 1e-15);
    EXPECT_NEAR(polylog_negint(1, 0.5), 2.0, 1e-15);
    for (int n = 0; n <= 8; ++n)
        for (double z : {-0.7, -0.2, 0.1, 0.3}) {
            long double acc = 0.0L;
            for (int k = 1; k < 400; ++k) acc += std::pow(static_cast<long double>(z), k) * std::pow(k, n);
            const double series = static_cast<double>(acc);
            EXPECT_NEAR(polylog_negint(n, z), series, 1e-11 * std::max(1.0, std::abs(series))) << n << " z=" << z;
        }
    // Near z -> 1 the closed form stays finite: Li_{-1}(z) = z / (1 - z)^2.
    EXPECT_NEAR(polylog_negint(1, 0.999), 0.999 / 1e-6, 1e-3);
}
