// CCVaR of an equally weighted 5-asset portfolio with standard uniform margins,
// by quadrature and by the rejection oracle, for each Archimedean family.

#include <cstdio>

#include "ccvar/ccvar.hpp"

int main() {
    using namespace ccvar;
    const int d = 5;
    const double beta = 0.95;
    const auto port = homogeneous_portfolio(d, uniform_quantile());

    std::printf("%-13s %7s %7s %10s %12s %12s %10s\n", "family", "theta", "tau", "1-K(beta)", "quadrature", "oracle",
                "oracle se");
    const std::pair<Family, double> cases[] = {
        {Family::Clayton, 2.0}, {Family::Frank, 5.0}, {Family::Gumbel, 1.57}, {Family::Joe, 2.0}, {Family::AMH, 0.7}};
    for (const auto& [family, theta] : cases) {
        const CopulaSpec spec(family, theta, d);
        const auto q = ccvar_quadrature(spec, port, beta);
        std::printf("%-13s %7.3f %7.4f %10.2e %12.6f", std::string(to_string(family)).c_str(), theta,
                    kendall_tau(spec), 1.0 - kendall_cdf(spec, beta), q.value);
        try {
            const auto mc = ccvar_mc_oracle(spec, port, beta, 200000, 1);
            std::printf(" %12.6f %10.6f\n", mc.value, *mc.std_error);
        } catch (const InsufficientSamplesError&) {
            // rejection sees almost nothing of {C(u) >= beta}
            std::printf(" %12s %10s\n", "-", "-");
        }
    }
    std::printf("%-13s %7s %7s %10s %12.6f\n", "independence", "-", "0", "", mcvar_independence(port, d, beta).value);
    std::printf("%-13s %7s %7s %10s %12.6f\n", "comonotone", "-", "1", "", ccvar_comonotone(port, beta).value);
}
