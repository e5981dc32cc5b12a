#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ccvar/fit.hpp"
#include "ccvar/frailty.hpp"
#include "ccvar/sampling.hpp"
#include "oracles.hpp"

using namespace ccvar;

namespace {

struct Case {
    Family family;
    double theta;
};

// Low and high dependence per family.
const std::vector<Case>& cases() {
    static const std::vector<Case> c{{Family::Clayton, 0.5}, {Family::Clayton, 5.0}, {Family::Frank, 1.0},
                                     {Family::Frank, 10.0},  {Family::Gumbel, 1.2},  {Family::Gumbel, 3.0},
                                     {Family::Joe, 1.3},     {Family::Joe, 4.0},     {Family::AMH, 0.3},
                                     {Family::AMH, 0.9}};
    return c;
}

std::string label(const Case& c) { return std::string(to_string(c.family)) + " theta=" + std::to_string(c.theta); }

} // namespace

TEST(Frailty, IndependenceIsPointMass) {
    const auto v = sample_frailty(CopulaSpec::independence(2), 9);
    EXPECT_EQ(v.value, 1.0);
    EXPECT_EQ(v.log_value, 0.0);
}

TEST(Frailty, ClaytonGammaMean) {
    const CopulaSpec spec(Family::Clayton, 1.0, 2);
    const auto lv = sample_log_frailties(spec, 1000000, 21);
    std::vector<double> v(lv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) v[i] = std::exp(lv[i]);
    const auto m = oracle::mean_se(v);
    EXPECT_NEAR(m.mean, 1.0, 3.0 * m.se);
}

TEST(Frailty, LaplaceTransformIsInverseGenerator) {
    for (const auto& c : cases()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        const auto lv = sample_log_frailties(spec, 1000000, 33);
        for (double s : {0.5, 1.0, 2.0}) {
            std::vector<double> x(lv.size());
            for (std::size_t i = 0; i < lv.size(); ++i) x[i] = std::exp(-s * std::exp(lv[i]));
            const auto m = oracle::mean_se(x);
            EXPECT_NEAR(m.mean, oracle::psi(c.family, c.theta, s), 3.0 * m.se) << label(c) << " s=" << s;
        }
    }
}

TEST(Frailty, DrawsArePositive) {
    for (const auto& c : cases()) {
        const auto lv = sample_log_frailties(CopulaSpec(c.family, c.theta, 2), 20000, 2);
        for (double l : lv) ASSERT_TRUE(std::isfinite(l)) << label(c);
    }
}

TEST(FAuxMonteCarlo, IndependenceIsExact) {
    EXPECT_EQ(f_aux_mc(CopulaSpec::independence(2), 1, std::log(2.0), 7, 1), 0.5);
}

TEST(FAuxMonteCarlo, ClaytonMatchesClosedForm) {
    const CopulaSpec spec(Family::Clayton, 1.0, 2);
    const auto e = f_aux_mc_estimate(spec, 0, 1.0, 1000000, 5);
    EXPECT_NEAR(e.value, -0.25, 3.0 * e.std_error);
    EXPECT_NEAR(f_aux(spec, 0, phi_inv(spec, 1.0)), -0.25, 1e-15);
}

TEST(FAuxMonteCarlo, AgreesWithClosedFormAcrossFamilies) {
    for (const auto& c : cases()) {
        const CopulaSpec spec(c.family, c.theta, 4);
        for (int i = 0; i < 3; ++i) {
            const double t = 0.6;
            const auto e = f_aux_mc_estimate(spec, i, phi(spec, t), 400000, 6 + i);
            EXPECT_NEAR(e.value, f_aux(spec, i, t), 3.0 * e.std_error + 1e-12) << label(c) << " i=" << i;
        }
    }
}

TEST(FAuxMonteCarlo, DeterministicUnderSeed) {
    const CopulaSpec spec(Family::Gumbel, 2.0, 3);
    EXPECT_EQ(f_aux_mc(spec, 1, 0.7, 1, 42), f_aux_mc(spec, 1, 0.7, 1, 42));
    EXPECT_THROW(f_aux_mc(spec, 1, 0.0, 10, 42), DomainError);
}

TEST(SampleCopula, IndependenceColumnsAreUniform) {
    int rejections = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto panel = sample_copula(CopulaSpec::independence(3), 5000, seed);
        for (std::size_t j = 0; j < 3; ++j) {
            const auto col = panel.column(j);
            rejections += oracle::ks_pvalue(oracle::ks_statistic(col), col.size()) < 0.01;
            ++total;
        }
    }
    EXPECT_LE(rejections, 2) << "of " << total;
}

TEST(SampleCopula, MarginsAreUniformForEveryFamily) {
    for (const auto& c : cases()) {
        const auto panel = sample_copula(CopulaSpec(c.family, c.theta, 3), 20000, 77);
        panel.validate();
        for (std::size_t j = 0; j < 3; ++j) {
            const auto col = panel.column(j);
            EXPECT_GT(oracle::ks_pvalue(oracle::ks_statistic(col), col.size()), 1e-3) << label(c) << " col " << j;
        }
    }
}

TEST(SampleCopula, ClaytonCentralProbability) {
    const CopulaSpec spec(Family::Clayton, 2.0, 2);
    const std::size_t n = 1000000;
    const auto panel = sample_copula(spec, n, 3);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += panel(i, 0) <= 0.5 && panel(i, 1) <= 0.5;
    const double p = static_cast<double>(hits) / n, se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(p, 1.0 / std::sqrt(7.0), 3.0 * se);
}

TEST(SampleCopula, EmpiricalCopulaOnInteriorGrid) {
    const std::size_t n = 1000000;
    for (const auto& c : cases())
        for (int d : {2, 5}) {
            const CopulaSpec spec(c.family, c.theta, d);
            const auto panel = sample_copula(spec, n, 100 + d);
            for (double a : {0.25, 0.5, 0.75})
                for (double b : {0.25, 0.5, 0.75}) {
                    std::vector<double> w(d);
                    for (int j = 0; j < d; ++j) w[j] = j % 2 ? b : a;
                    std::size_t hits = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const auto r = panel.row(i);
                        bool in = true;
                        for (int j = 0; j < d && in; ++j) in = r[j] <= w[j];
                        hits += in;
                    }
                    const double p = static_cast<double>(hits) / n, se = std::sqrt(p * (1 - p) / n);
                    EXPECT_NEAR(p, copula_cdf(spec, w), 3.0 * se) << label(c) << " d=" << d << " a=" << a << " b=" << b;
                }
        }
}

TEST(SampleCopula, TauIdentityFromCopulaExpectation) {
    // tau = 4 E[C(U, V)] - 1.
    for (const auto& c : cases()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        const auto panel = sample_copula(spec, 1000000, 8);
        std::vector<double> x(panel.rows());
        for (std::size_t i = 0; i < panel.rows(); ++i) x[i] = 4.0 * copula_cdf(spec, panel.row(i)) - 1.0;
        const auto m = oracle::mean_se(x);
        EXPECT_NEAR(m.mean, kendall_tau(spec), 3.0 * m.se) << label(c);
    }
}

TEST(SampleCopula, SampleTauMatchesFormula) {
    // Batch means of the unbiased sample tau.
    for (const auto& c : cases()) {
        const CopulaSpec spec(c.family, c.theta, 2);
        const auto panel = sample_copula(spec, 200000, 12);
        const std::size_t batch = 2000;
        std::vector<double> taus;
        for (std::size_t lo = 0; lo + batch <= panel.rows(); lo += batch) {
            std::vector<double> x(batch), y(batch);
            for (std::size_t i = 0; i < batch; ++i) {
                x[i] = panel(lo + i, 0);
                y[i] = panel(lo + i, 1);
            }
            taus.push_back(sample_kendall_tau(x, y));
        }
        const auto m = oracle::mean_se(taus);
        EXPECT_NEAR(m.mean, kendall_tau(spec), 3.0 * m.se) << label(c);
    }
}

TEST(SampleCopula, DeterministicAcrossThreadCounts) {
    const CopulaSpec spec(Family::Joe, 2.5, 4);
    const auto a = sample_copula(spec, 30000, 99, 1);
    const auto b = sample_copula(spec, 30000, 99, 3);
    const auto c = sample_copula(spec, 30000, 99, 8);
    EXPECT_EQ(a.data(), b.data());
    EXPECT_EQ(a.data(), c.data());
    EXPECT_NE(a.data(), sample_copula(spec, 30000, 100, 1).data());
}

TEST(SampleCopula, StrongDependenceStaysInsideUnitCube) {
    for (const auto& c : std::vector<Case>{{Family::Clayton, 50.0}, {Family::Gumbel, 30.0}, {Family::Joe, 30.0},
                                           {Family::Frank, 60.0}}) {
        const auto panel = sample_copula(CopulaSpec(c.family, c.theta, 7), 20000, 4);
        EXPECT_NO_THROW(panel.validate()) << label(c);
    }
}

TEST(PanelCsv, HeaderAndRows) {
    const auto panel = sample_copula(CopulaSpec(Family::Frank, 2.0, 3), 4, 1);
    std::ostringstream os;
    write_panel_csv(panel, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "u1,u2,u3");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(VarCvar, ComonotoneUniform) {
    const std::size_t n = 200000;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> data;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = unif(rng);
        data.insert(data.end(), {u, u, u});
    }
    const UniformPanel panel(n, 3, data);
    const auto r = portfolio_var_cvar(panel, homogeneous_portfolio(3, uniform_quantile()), 0.95);
    EXPECT_NEAR(r.var, 0.95, 5e-3);
    EXPECT_NEAR(r.cvar, 0.975, 3.0 * r.cvar_stderr + 1e-3);
}

TEST(VarCvar, SingleUniformAsset) {
    const std::size_t n = 1000000;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> data(n);
    for (auto& x : data) x = unif(rng);
    const UniformPanel panel(n, 1, data);
    const auto r = portfolio_var_cvar(panel, PortfolioSpec{{1.0}, {uniform_quantile()}}, 0.9);
    // Order statistic sd is sqrt(p(1-p)/n); tail mean has its own standard error.
    EXPECT_NEAR(r.var, 0.9, 3.0 * std::sqrt(0.09 / n));
    EXPECT_NEAR(r.cvar, 0.95, 3.0 * r.cvar_stderr + 3.0 * std::sqrt(0.09 / n) / 2.0);
    EXPECT_LE(r.var, r.cvar);
}

TEST(VarCvar, InfBasedQuantileAndStrictExceedance) {
    // ECDF reaches 0.8 at the 8th order statistic.
    std::vector<double> z{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    const auto r = loss_var_cvar(z, 0.8);
    EXPECT_EQ(r.var, 8.0);
    EXPECT_EQ(r.exceedances, 2u);
    EXPECT_DOUBLE_EQ(r.cvar, 9.5);
    EXPECT_EQ(loss_var_cvar(z, 0.75).var, 8.0);
    EXPECT_EQ(loss_var_cvar(z, 0.0).var, 1.0);
}

TEST(VarCvar, Errors) {
    const std::vector<double> flat(100, 1.0);
    EXPECT_THROW(loss_var_cvar(flat, 0.9), InsufficientSamplesError);
    EXPECT_THROW(loss_var_cvar({}, 0.9), InsufficientSamplesError);
    const UniformPanel panel(10, 2);
    EXPECT_THROW(portfolio_var_cvar(panel, homogeneous_portfolio(3, uniform_quantile()), 0.9), DimensionError);
}

TEST(VarCvar, OrderingOnCopulaSamples) {
    for (const auto& c : cases()) {
        const auto panel = sample_copula(CopulaSpec(c.family, c.theta, 4), 50000, 3);
        for (double beta : {0.9, 0.95, 0.99}) {
            const auto r = portfolio_var_cvar(panel, homogeneous_portfolio(4, student_t_quantile(4.0)), beta);
            EXPECT_LE(r.var, r.cvar) << label(c);
        }
    }
}

TEST(Frailty, SibuyaHeavyTailLaplaceTransform) {
    for (double theta : {10.0, 30.0}) {
        const CopulaSpec spec(Family::Joe, theta, 2);
        const auto lv = sample_log_frailties(spec, 400000, 17);
        for (double s : {0.1, 1.0}) {
            std::vector<double> x(lv.size());
            for (std::size_t i = 0; i < lv.size(); ++i) x[i] = std::exp(-s * std::exp(lv[i]));
            const auto m = oracle::mean_se(x);
            EXPECT_NEAR(m.mean, oracle::psi(Family::Joe, theta, s), 3.0 * m.se) << theta << " s=" << s;
        }
    }
}
