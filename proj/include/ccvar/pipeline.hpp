#ifndef CCVAR_PIPELINE_HPP
#define CCVAR_PIPELINE_HPP

// End-to-end risk pipeline: IFM fits (AR(1)-GARCH(1,1) margins, then copulas on
// the PIT panel), one-step-ahead VaR/CVaR by copula simulation, CCVaR by
// quadrature, rolling backtests and plot data for the CCVaR sweeps.
//
// Units: returns are negative log-returns scaled by 100, so every risk number is a
// loss in percent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ccvar/data.hpp"
#include "ccvar/error.hpp"
#include "ccvar/fit.hpp"
#include "ccvar/garch.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/innovations.hpp"
#include "ccvar/keyvalue.hpp"
#include "ccvar/measure.hpp"
#include "ccvar/portfolio.hpp"
#include "ccvar/random.hpp"
#include "ccvar/sampling.hpp"

namespace ccvar {

inline constexpr const char* kUnitsNote = "# units: negative log-returns x100 (losses in percent)";

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = cur.find_last_not_of(" \t");
        out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

inline std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& tok : split_list(s)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size()) throw ParseError(std::string(what) + ": '" + tok + "' is not a number");
        out.push_back(v);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(seed ^ splitmix64(splitmix64(a + 0x632be59bd9b4e019ULL) ^ b));
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

inline std::vector<Family> all_families() {
    return {Family::Independence, Family::Clayton, Family::Frank, Family::Gumbel, Family::Joe, Family::AMH};
}

inline std::vector<InnovationKind> all_innovations() {
    return {InnovationKind::Normal, InnovationKind::StudentT, InnovationKind::SkewedT};
}

inline std::vector<Family> parse_family_list(const std::string& s) {
    if (s == "all") return all_families();
    std::vector<Family> out;
    for (const auto& tok : detail::split_list(s)) out.push_back(parse_family(tok));
    if (out.empty()) throw ParameterError("empty family list");
    return out;
}

inline std::vector<InnovationKind> parse_innovation_list(const std::string& s) {
    if (s == "all") return all_innovations();
    std::vector<InnovationKind> out;
    for (const auto& tok : detail::split_list(s)) out.push_back(parse_innovation(tok));
    if (out.empty()) throw ParameterError("empty innovation list");
    return out;
}

/// Weakly dependent copulas in 7 dimensions put 1 - K(0.99) near 1e-18; it is
/// evaluated without cancellation, so the pipeline only rejects a zero denominator.
inline QuadConfig pipeline_quad() {
    QuadConfig q;
    q.min_denominator = 1e-300;
    return q;
}

struct PipelineConfig {
    std::string input;
    std::vector<std::string> assets; // empty: every column
    std::vector<InnovationKind> innovations = all_innovations();
    std::vector<Family> families = all_families();
    std::vector<double> betas{0.95, 0.99};
    std::vector<double> weights; // empty: equal
    std::vector<double> gammas{0.8, 0.9};
    std::size_t window = 1000;
    std::size_t mc_samples = 1000000;
    QuadConfig quad = pipeline_quad();
    std::uint64_t seed = 20240917;
    std::string out = "out";
    unsigned threads = 0;
    std::size_t backtest_block = 20; // windows per warm-start chain

    /// Checks that do not need the data.
    void validate() const {
        if (betas.empty()) throw ParameterError("config: the beta list is empty");
        for (double b : betas)
            if (!(b >= 0.0 && b < 1.0)) throw DomainError("config: beta must lie in [0, 1)");
        for (double g : gammas)
            if (!(g > 0.0 && g < 1.0)) throw DomainError("config: gamma must lie in (0, 1)");
        if (families.empty()) throw ParameterError("config: no copula family selected");
        if (innovations.empty()) throw ParameterError("config: no innovation selected");
        if (mc_samples < 1000) throw ParameterError("config: mc_samples must be >= 1000");
        if (window < 250) throw ParameterError("config: window must be >= 250");
        if (backtest_block == 0) throw ParameterError("config: backtest_block must be >= 1");
        quad.validate();
        if (!weights.empty()) {
            double s = 0.0;
            for (double w : weights) {
                if (!(w >= 0.0 && w <= 1.0)) throw ParameterError("config: weights must lie in [0, 1]");
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-9) throw ParameterError("config: weights must sum to 1");
        }
    }

    std::vector<double> weights_for(std::size_t d) const {
        if (weights.empty()) return equal_weights(d);
        if (weights.size() != d)
            throw DimensionError("config: " + std::to_string(weights.size()) + " weights for " + std::to_string(d) +
                                 " assets");
        return weights;
    }

    static PipelineConfig from_kv(const KeyValue& kv) {
        PipelineConfig c;
        c.input = kv.get_or("input", c.input);
        if (kv.has("assets")) c.assets = detail::split_list(kv.get("assets"));
        if (kv.has("innovation")) c.innovations = parse_innovation_list(kv.get("innovation"));
        if (kv.has("family")) c.families = parse_family_list(kv.get("family"));
        if (kv.has("beta")) c.betas = detail::parse_doubles(kv.get("beta"), "beta");
        if (kv.has("weights")) c.weights = detail::parse_doubles(kv.get("weights"), "weights");
        if (kv.has("gamma")) c.gammas = detail::parse_doubles(kv.get("gamma"), "gamma");
        if (kv.has("window")) c.window = static_cast<std::size_t>(kv.get_int("window"));
        if (kv.has("mc_samples")) c.mc_samples = static_cast<std::size_t>(kv.get_double("mc_samples"));
        c.quad.abs_tol = kv.get_double_or("abs_tol", c.quad.abs_tol);
        c.quad.rel_tol = kv.get_double_or("rel_tol", c.quad.rel_tol);
        if (kv.has("max_subdivisions")) c.quad.max_subdivisions = static_cast<int>(kv.get_int("max_subdivisions"));
        c.quad.singular_clip = kv.get_double_or("singular_clip", c.quad.singular_clip);
        c.quad.min_denominator = kv.get_double_or("min_denominator", c.quad.min_denominator);
        if (kv.has("seed")) c.seed = static_cast<std::uint64_t>(kv.get_int("seed"));
        c.out = kv.get_or("out", c.out);
        if (kv.has("threads")) c.threads = static_cast<unsigned>(kv.get_int("threads"));
        if (kv.has("backtest_block")) c.backtest_block = static_cast<std::size_t>(kv.get_int("backtest_block"));
        return c;
    }

    KeyValue to_kv() const {
        KeyValue kv;
        kv.set("input", input);
        kv.set("assets", detail::join(assets));
        std::vector<std::string> inn, fam;
        for (auto k : innovations) inn.emplace_back(to_string(k));
        for (auto f : families) fam.emplace_back(to_string(f));
        kv.set("innovation", detail::join(inn));
        kv.set("family", detail::join(fam));
        kv.set("beta", detail::join(betas));
        kv.set("weights", detail::join(weights));
        kv.set("gamma", detail::join(gammas));
        kv.set("window", window);
        kv.set("mc_samples", mc_samples);
        kv.set("abs_tol", quad.abs_tol);
        kv.set("rel_tol", quad.rel_tol);
        kv.set("max_subdivisions", quad.max_subdivisions);
        kv.set("singular_clip", quad.singular_clip);
        kv.set("min_denominator", quad.min_denominator);
        kv.set("seed", std::to_string(seed));
        kv.set("out", out);
        kv.set("threads", static_cast<int>(threads));
        kv.set("backtest_block", backtest_block);
        return kv;
    }
};

// ---------------------------------------------------------------------------
// fitted models

struct MarginSet {
    InnovationKind kind = InnovationKind::Normal;
    std::vector<MarginModel> models; // one per asset
    std::string error;               // nonempty: at least one asset failed
};

struct FittedCopula {
    InnovationKind margin = InnovationKind::Normal;
    Family family = Family::Independence;
    std::optional<CopulaSpec> spec;
    double std_error = 0.0;
    double loglik = 0.0;
    bool boundary = false;
    std::vector<double> tail_distance; // d_gamma for each configured gamma
    std::string error;
};

struct FittedModels {
    std::vector<std::string> symbols;
    std::vector<MarginSet> margins;
    std::vector<FittedCopula> copulas;

    const MarginSet* margin_set(InnovationKind k) const {
        for (const auto& m : margins)
            if (m.kind == k) return &m;
        return nullptr;
    }
    const FittedCopula* copula(InnovationKind k, Family f) const {
        for (const auto& c : copulas)
            if (c.margin == k && c.family == f) return &c;
        return nullptr;
    }
};

struct FitOptions {
    bool standard_errors = true;
    bool tail_distance = true;
    const FittedModels* warm_start = nullptr;
};

/// PIT panel of the fitted margins; rows are dates 2..T of the series.
inline UniformPanel pit_panel(const std::vector<MarginModel>& models, const ReturnTable& data) {
    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < models.size(); ++i) cols.push_back(pit_transform(models[i], data.columns[i]));
    const std::size_t rows = cols.front().size();
    std::vector<double> flat(rows * cols.size());
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t j = 0; j < cols.size(); ++j) flat[t * cols.size() + j] = cols[j][t];
    return UniformPanel(rows, cols.size(), std::move(flat));
}

/// IFM: each margin by QML, then each copula family by ML on the PIT panel.
/// Failures are recorded in the cell and do not stop the other cells.
inline FittedModels fit_models(const PipelineConfig& cfg, const ReturnTable& data, const FitOptions& opt = {}) {
    const std::size_t d = data.dim();
    if (d < 2 || d > static_cast<std::size_t>(kMaxDim)) throw DimensionError("fit_models: need 2..20 assets");
    FittedModels out;
    out.symbols = data.symbols;
    for (auto kind : cfg.innovations) {
        MarginSet ms;
        ms.kind = kind;
        try {
            for (std::size_t i = 0; i < d; ++i) {
                GarchFitOptions go;
                go.standard_errors = opt.standard_errors;
                if (opt.warm_start)
                    if (const auto* w = opt.warm_start->margin_set(kind); w && w->error.empty() && i < w->models.size())
                        go.warm_start = &w->models[i];
                ms.models.push_back(fit_ar_garch(data.columns[i], kind, go));
            }
        } catch (const Error& e) {
            ms.error = "margin " + data.symbols[ms.models.size()] + ": " + e.what();
        }
        std::optional<UniformPanel> panel;
        if (ms.error.empty()) panel = pit_panel(ms.models, data);
        for (auto fam : cfg.families) {
            FittedCopula fc;
            fc.margin = kind;
            fc.family = fam;
            if (!panel) {
                fc.error = ms.error;
            } else {
                try {
                    if (fam == Family::Independence) {
                        fc.spec = CopulaSpec::independence(static_cast<int>(d));
                        fc.loglik = 0.0;
                    } else {
                        const auto fit = fit_copula_mle(*panel, fam, FitMethod::IFM);
                        fc.spec = fit.spec;
                        fc.std_error = fit.std_error;
                        fc.loglik = fit.loglik;
                        fc.boundary = fit.boundary;
                    }
                    if (opt.tail_distance)
                        for (double g : cfg.gammas) fc.tail_distance.push_back(gof_tail_distance(*panel, *fc.spec, g));
                } catch (const Error& e) {
                    fc.error = std::string(to_string(fam)) + ": " + e.what();
                }
            }
            out.copulas.push_back(std::move(fc));
        }
        out.margins.push_back(std::move(ms));
    }
    return out;
}

inline void write_models(const FittedModels& fm, KeyValue& kv) {
    kv.set("symbols", detail::join(fm.symbols));
    for (const auto& ms : fm.margins) {
        const std::string k(to_string(ms.kind));
        if (!ms.error.empty()) {
            kv.set("margin." + k + ".error", ms.error);
            continue;
        }
        for (std::size_t i = 0; i < ms.models.size(); ++i)
            write_model(ms.models[i], kv, "margin." + k + "." + fm.symbols[i] + ".");
    }
    for (const auto& c : fm.copulas) {
        const std::string p = "copula." + std::string(to_string(c.margin)) + "." + std::string(to_string(c.family)) + ".";
        if (!c.error.empty()) {
            kv.set(p + "error", c.error);
            continue;
        }
        kv.set(p + "theta", c.spec->theta());
        kv.set(p + "se", c.std_error);
        kv.set(p + "loglik", c.loglik);
        kv.set(p + "boundary", c.boundary ? 1 : 0);
        if (!c.tail_distance.empty()) kv.set(p + "tail_distance", detail::join(c.tail_distance));
    }
}

/// Reads the models named by cfg (innovations x families) back from key-value text.
inline FittedModels read_models(const KeyValue& kv, const PipelineConfig& cfg) {
    FittedModels fm;
    fm.symbols = detail::split_list(kv.get("symbols"));
    const int d = static_cast<int>(fm.symbols.size());
    for (auto kind : cfg.innovations) {
        const std::string k(to_string(kind));
        MarginSet ms;
        ms.kind = kind;
        if (kv.has("margin." + k + ".error")) {
            ms.error = kv.get("margin." + k + ".error");
        } else {
            for (const auto& s : fm.symbols) ms.models.push_back(read_model(kv, "margin." + k + "." + s + "."));
        }
        for (auto fam : cfg.families) {
            FittedCopula c;
            c.margin = kind;
            c.family = fam;
            const std::string p = "copula." + k + "." + std::string(to_string(fam)) + ".";
            if (kv.has(p + "error")) {
                c.error = kv.get(p + "error");
            } else {
                c.spec = fam == Family::Independence ? CopulaSpec::independence(d)
                                                     : CopulaSpec(fam, kv.get_double(p + "theta"), d);
                c.std_error = kv.get_double_or(p + "se", 0.0);
                c.loglik = kv.get_double_or(p + "loglik", 0.0);
                c.boundary = kv.get_double_or(p + "boundary", 0.0) != 0.0;
                if (kv.has(p + "tail_distance"))
                    c.tail_distance = detail::parse_doubles(kv.get(p + "tail_distance"), "tail_distance");
            }
            fm.copulas.push_back(std::move(c));
        }
        fm.margins.push_back(std::move(ms));
    }
    return fm;
}

inline void write_copula_fit_csv(const FittedModels& fm, const PipelineConfig& cfg, std::ostream& os) {
    os << "copula,margin,theta,stderr,loglik,boundary";
    for (double g : cfg.gammas) os << ",d_" << g;
    os << ",error\n";
    os.precision(10);
    for (const auto& c : fm.copulas) {
        os << to_string(c.family) << ',' << to_string(c.margin) << ',';
        if (c.error.empty()) {
            os << c.spec->theta() << ',' << c.std_error << ',' << c.loglik << ',' << (c.boundary ? 1 : 0);
            for (std::size_t i = 0; i < cfg.gammas.size(); ++i)
                os << ',' << (i < c.tail_distance.size() ? c.tail_distance[i] : std::nan(""));
            os << ",\n";
        } else {
            os << "nan,nan,nan,0";
            for (std::size_t i = 0; i < cfg.gammas.size(); ++i) os << ",nan";
            os << ",\"" << c.error << "\"\n";
        }
    }
}

inline void write_margin_fit_csv(const FittedModels& fm, std::ostream& os) {
    os << "margin,asset,parameter,estimate,stderr\n";
    os.precision(10);
    for (const auto& ms : fm.margins) {
        if (!ms.error.empty()) continue;
        for (std::size_t i = 0; i < ms.models.size(); ++i) {
            const auto& m = ms.models[i];
            const auto names = m.parameter_names();
            const auto vals = m.parameters();
            for (std::size_t k = 0; k < names.size(); ++k) {
                os << to_string(ms.kind) << ',' << fm.symbols[i] << ',' << names[k] << ',' << vals[k] << ',';
                if (k < m.std_errors.size())
                    os << m.std_errors[k];
                else
                    os << "nan";
                os << '\n';
            }
            os << to_string(ms.kind) << ',' << fm.symbols[i] << ",loglik," << m.loglik << ",nan\n";
        }
    }
}

// ---------------------------------------------------------------------------
// one-step-ahead risk

struct RiskRow {
    std::string copula;
    std::string margin;
    double beta = 0.0;
    double var = std::numeric_limits<double>::quiet_NaN();
    double cvar = std::numeric_limits<double>::quiet_NaN();
    double ccvar = std::numeric_limits<double>::quiet_NaN();
    std::string method;
    double stderr_ = std::numeric_limits<double>::quiet_NaN(); // MC standard error of CVaR
    double runtime_ms = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

struct RiskReport {
    std::vector<RiskRow> rows;
    std::vector<std::string> errors;
};

/// Exact one-step-ahead margin quantiles mu_{T+1} + sigma_{T+1} F_z^{-1}(p).
inline PortfolioSpec forecast_portfolio(const std::vector<MarginModel>& models, const std::vector<double>& weights) {
    PortfolioSpec port;
    port.weights = weights;
    for (const auto& m : models) {
        const auto [mu, v] = forecast_moments(m);
        const double sd = std::sqrt(v);
        port.quantiles.push_back([innov = m.innovation, mu, sd](double p) { return mu + sd * innov.quantile(p); });
    }
    return port;
}

/// Same quantiles through QuantileTable, for transforming large simulated panels.
inline PortfolioSpec forecast_portfolio_tabulated(const std::vector<MarginModel>& models,
                                                  const std::vector<double>& weights) {
    PortfolioSpec port;
    port.weights = weights;
    for (const auto& m : models) {
        const auto [mu, v] = forecast_moments(m);
        const double sd = std::sqrt(v);
        port.quantiles.push_back([tab = std::make_shared<const QuantileTable>(m.innovation), mu, sd](double p) {
            return mu + sd * (*tab)(p);
        });
    }
    return port;
}

/// Risk rows for one (innovation, family) cell, one per beta.
inline std::vector<RiskRow> evaluate_cell(const PipelineConfig& cfg, const MarginSet& ms, const FittedCopula& fc,
                                          std::uint64_t seed, unsigned threads) {
    std::vector<RiskRow> rows;
    for (double b : cfg.betas) {
        RiskRow r;
        r.copula = std::string(to_string(fc.family));
        r.margin = std::string(to_string(ms.kind));
        r.beta = b;
        r.method = "error";
        rows.push_back(std::move(r));
    }
    auto fail = [&](const std::string& msg) {
        for (auto& r : rows) r.error = msg;
        return rows;
    };
    if (!fc.error.empty()) return fail(fc.error);
    if (!ms.error.empty()) return fail(ms.error);
    try {
        const auto w = cfg.weights_for(ms.models.size());
        const auto exact = forecast_portfolio(ms.models, w);
        const auto fast = forecast_portfolio_tabulated(ms.models, w);
        const auto t0 = std::chrono::steady_clock::now();
        const auto panel = sample_copula(*fc.spec, cfg.mc_samples, seed, threads);
        const auto losses = portfolio_losses(panel, fast);
        const double mc_ms = detail::elapsed_ms(t0);
        for (auto& r : rows) {
            const auto t1 = std::chrono::steady_clock::now();
            try {
                const auto vc = loss_var_cvar(losses, r.beta);
                r.var = vc.var;
                r.cvar = vc.cvar;
                r.stderr_ = vc.cvar_stderr;
                const auto cc = ccvar_quadrature(*fc.spec, exact, r.beta, cfg.quad);
                r.ccvar = cc.value;
                r.method = cc.stochastic ? "quadrature+mc" : "quadrature";
            } catch (const Error& e) {
                r.error = r.copula + "/" + r.margin + "/beta=" + std::to_string(r.beta) + ": " + e.what();
                r.method = "error";
            }
            r.runtime_ms = mc_ms + detail::elapsed_ms(t1);
        }
    } catch (const Error& e) {
        return fail(std::string(to_string(fc.family)) + "/" + std::string(to_string(ms.kind)) + ": " + e.what());
    }
    return rows;
}

inline RiskReport evaluate_risk(const PipelineConfig& cfg, const FittedModels& fm) {
    cfg.validate();
    RiskReport rep;
    for (auto kind : cfg.innovations) {
        const auto* ms = fm.margin_set(kind);
        if (!ms) throw StateError("evaluate_risk: no fitted margins for innovation " + std::string(to_string(kind)));
        for (auto fam : cfg.families) {
            const auto* fc = fm.copula(kind, fam);
            if (!fc) throw StateError("evaluate_risk: no fitted copula " + std::string(to_string(fam)));
            // common random numbers across innovations: the seed depends on the family only
            const auto seed = detail::derive_seed(cfg.seed, static_cast<std::uint64_t>(fam));
            for (auto& r : evaluate_cell(cfg, *ms, *fc, seed, cfg.threads)) {
                if (!r.ok()) rep.errors.push_back(r.error);
                rep.rows.push_back(std::move(r));
            }
        }
    }
    return rep;
}

inline RiskReport risk_once(const PipelineConfig& cfg, const ReturnTable& data) {
    cfg.validate();
    return evaluate_risk(cfg, fit_models(cfg, data));
}

struct FamilySpread {
    std::string margin;
    double beta = 0.0;
    double ccvar_range = 0.0;
    double cvar_range = 0.0;
    std::size_t families = 0;
};

/// max - min of CCVaR and of CVaR across copula families, per (margin, beta).
inline std::vector<FamilySpread> family_spreads(const RiskReport& rep) {
    std::map<std::pair<std::string, double>, std::vector<const RiskRow*>> groups;
    std::vector<std::pair<std::string, double>> order;
    for (const auto& r : rep.rows) {
        if (!r.ok()) continue;
        auto key = std::make_pair(r.margin, r.beta);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&r);
    }
    std::vector<FamilySpread> out;
    for (const auto& key : order) {
        const auto& g = groups[key];
        FamilySpread s{key.first, key.second};
        double clo = INFINITY, chi = -INFINITY, vlo = INFINITY, vhi = -INFINITY;
        for (const auto* r : g) {
            clo = std::min(clo, r->ccvar);
            chi = std::max(chi, r->ccvar);
            vlo = std::min(vlo, r->cvar);
            vhi = std::max(vhi, r->cvar);
        }
        s.ccvar_range = chi - clo;
        s.cvar_range = vhi - vlo;
        s.families = g.size();
        out.push_back(s);
    }
    return out;
}

inline void write_risk_csv(const RiskReport& rep, std::ostream& os) {
    os << kUnitsNote << '\n';
    os << "copula,margin,beta,var,cvar,ccvar,method,stderr,runtime_ms\n";
    os.precision(10);
    for (const auto& r : rep.rows)
        os << r.copula << ',' << r.margin << ',' << r.beta << ',' << r.var << ',' << r.cvar << ',' << r.ccvar << ','
           << r.method << ',' << r.stderr_ << ',' << r.runtime_ms << '\n';
}

inline void write_spread_csv(const std::vector<FamilySpread>& s, std::ostream& os) {
    os << "margin,beta,families,ccvar_range,cvar_range\n";
    os.precision(10);
    for (const auto& x : s)
        os << x.margin << ',' << x.beta << ',' << x.families << ',' << x.ccvar_range << ',' << x.cvar_range << '\n';
}

// ---------------------------------------------------------------------------
// rolling backtest

struct BacktestRow {
    std::size_t window = 0; // forecast for return row window + cfg.window
    std::string date;
    std::string copula;
    std::string margin;
    double beta = 0.0;
    double var = 0.0;
    double cvar = 0.0;
    double ccvar = 0.0;
    double realized = 0.0; // sum_i lambda_i r_{i, t+1}
};

struct BacktestReport {
    std::vector<BacktestRow> rows; // ordered by window, then innovation, family, beta
    std::vector<std::string> errors;
    std::size_t windows = 0;
    std::size_t failed_cells = 0;
};

/// Windows [w, w + window) for w = 0 .. T - window - 1, each forecasting row w + window.
/// Windows are grouped in blocks of cfg.backtest_block; inside a block each refit
/// starts from the previous window's estimates. Blocks are spread over threads, and
/// the result does not depend on the thread count.
inline BacktestReport backtest(const PipelineConfig& cfg, const ReturnTable& data) {
    cfg.validate();
    if (data.rows() <= cfg.window)
        throw InsufficientSamplesError("backtest: series length " + std::to_string(data.rows()) +
                                       " must exceed the window " + std::to_string(cfg.window));
    const std::size_t nw = data.rows() - cfg.window;
    const auto w = cfg.weights_for(data.dim());
    std::vector<std::vector<BacktestRow>> rows(nw);
    std::vector<std::vector<std::string>> errs(nw);
    const std::size_t blocks = (nw + cfg.backtest_block - 1) / cfg.backtest_block;
    parallel_for(blocks, cfg.threads, [&](std::size_t b) {
        std::optional<FittedModels> prev;
        for (std::size_t k = b * cfg.backtest_block; k < std::min(nw, (b + 1) * cfg.backtest_block); ++k) {
            const auto win = data.slice(k, k + cfg.window);
            const std::size_t t1 = k + cfg.window;
            double realized = 0.0;
            for (std::size_t i = 0; i < data.dim(); ++i) realized += w[i] * data.columns[i][t1];
            try {
                FitOptions fo;
                fo.standard_errors = false;
                fo.tail_distance = false;
                fo.warm_start = prev ? &*prev : nullptr;
                auto fm = fit_models(cfg, win, fo);
                for (auto kind : cfg.innovations)
                    for (auto fam : cfg.families) {
                        const auto seed = detail::derive_seed(cfg.seed, static_cast<std::uint64_t>(fam), k + 1);
                        for (const auto& r : evaluate_cell(cfg, *fm.margin_set(kind), *fm.copula(kind, fam), seed, 1)) {
                            if (!r.ok()) {
                                errs[k].push_back("window " + std::to_string(k) + ": " + r.error);
                                continue;
                            }
                            rows[k].push_back({k, data.dates[t1], r.copula, r.margin, r.beta, r.var, r.cvar, r.ccvar,
                                               realized});
                        }
                    }
                prev = std::move(fm);
            } catch (const Error& e) {
                errs[k].push_back("window " + std::to_string(k) + ": " + e.what());
            }
        }
    });
    BacktestReport rep;
    rep.windows = nw;
    for (std::size_t k = 0; k < nw; ++k) {
        for (auto& r : rows[k]) rep.rows.push_back(std::move(r));
        rep.failed_cells += errs[k].size();
        for (auto& e : errs[k]) rep.errors.push_back(std::move(e));
    }
    return rep;
}

inline void write_backtest_csv(const BacktestReport& rep, std::ostream& os) {
    os << kUnitsNote << '\n';
    os << "window,date,copula,margin,beta,var,cvar,ccvar,realized\n";
    os.precision(10);
    for (const auto& r : rep.rows)
        os << r.window << ',' << r.date << ',' << r.copula << ',' << r.margin << ',' << r.beta << ',' << r.var << ','
           << r.cvar << ',' << r.ccvar << ',' << r.realized << '\n';
}

// ---------------------------------------------------------------------------
// CCVaR sweeps with standard uniform margins

struct SweepPoint {
    std::string figure;
    Family family = Family::Independence;
    double theta = 0.0;
    double beta = 0.0;
    double ccvar = 0.0;
};

/// Dependence levels plotted per family against beta.
inline std::vector<double> sweep_thetas(Family f) {
    switch (f) {
    case Family::Independence: return {0.0};
    case Family::Clayton: return {0.5, 1.0, 2.0, 5.0, 10.0};
    case Family::Frank: return {1.0, 3.0, 5.0, 10.0, 20.0};
    case Family::Gumbel: return {1.25, 1.5, 2.0, 3.0, 5.0};
    case Family::Joe: return {1.25, 1.5, 2.0, 3.0, 5.0};
    case Family::AMH: return {0.2, 0.4, 0.6, 0.8, 0.95};
    }
    return {};
}

/// CCVaR against beta in [0.50, 0.99], d = 5, equal weights.
inline std::vector<SweepPoint> sweep_beta(const QuadConfig& quad = {}, int d = 5) {
    std::vector<SweepPoint> out;
    const auto port = homogeneous_portfolio(static_cast<std::size_t>(d), uniform_quantile());
    for (auto f : all_families())
        for (double th : sweep_thetas(f)) {
            const CopulaSpec spec(f, th, d);
            for (int k = 50; k <= 99; ++k) {
                const double b = k / 100.0;
                const double v = f == Family::Independence ? mcvar_independence(port, d, b, quad).value
                                                           : ccvar_quadrature(spec, port, b, quad).value;
                out.push_back({"beta", f, th, b, v});
            }
        }
    return out;
}

/// CCVaR against theta at beta = 0.95, d = 2, weights (1, 0): AMH over [0, 0.99],
/// Gumbel over [1, 10].
inline std::vector<SweepPoint> sweep_theta(const QuadConfig& quad = {}, double beta = 0.95) {
    std::vector<SweepPoint> out;
    PortfolioSpec port{{1.0, 0.0}, {uniform_quantile(), uniform_quantile()}};
    for (int k = 0; k <= 99; ++k) {
        const double th = k / 100.0;
        out.push_back({"theta", Family::AMH, th, beta, ccvar_quadrature(CopulaSpec(Family::AMH, th, 2), port, beta, quad).value});
    }
    for (int k = 0; k <= 180; ++k) {
        const double th = 1.0 + k * 0.05;
        out.push_back(
            {"theta", Family::Gumbel, th, beta, ccvar_quadrature(CopulaSpec(Family::Gumbel, th, 2), port, beta, quad).value});
    }
    return out;
}

inline void write_sweep_csv(const std::vector<SweepPoint>& pts, std::ostream& os) {
    os << "sweep,copula,theta,beta,ccvar\n";
    os.precision(12);
    for (const auto& p : pts)
        os << p.figure << ',' << to_string(p.family) << ',' << p.theta << ',' << p.beta << ',' << p.ccvar << '\n';
}

} // namespace ccvar

#endif
