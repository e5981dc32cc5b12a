// ccvar: command-line front end of the CCVaR pipeline.
//
//   ccvar synth       --out DIR [--family gumbel --theta 1.57 --dim 7 --rows 1361]
//   ccvar ingest      --input prices.csv --out DIR
//   ccvar fit-margins --input prices.csv [--innovation t] --out DIR
//   ccvar fit-copula  --input prices.csv [--family all] --out DIR
//   ccvar risk        --input prices.csv [--models DIR/models.kv] --out DIR
//   ccvar backtest    --input prices.csv --family gumbel --innovation t --out DIR
//   ccvar sweep       --out DIR
//   ccvar sample      --family clayton --theta 2 --dim 3 --n 1000 --out DIR
//
// Settings come from defaults, then --config (key = value lines), then flags.
// Exit status: 0 success, 1 runtime failure, 2 usage error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ccvar/ccvar.hpp"

namespace fs = std::filesystem;
using namespace ccvar;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Shared {
    std::string input, config, family, innovation, beta, weights, out;
    std::string window, mc_samples, seed, threads;
};

void add_shared(CLI::App* app, Shared& s) {
    app->add_option("--input", s.input, "prices CSV with header date,SYM1,...");
    app->add_option("--config", s.config, "key = value configuration file");
    app->add_option("--family", s.family, "copula family list or 'all'");
    app->add_option("--innovation", s.innovation, "innovation list (normal, t, skewt) or 'all'");
    app->add_option("--beta", s.beta, "comma-separated risk levels");
    app->add_option("--weights", s.weights, "comma-separated portfolio weights");
    app->add_option("--window", s.window, "backtest window length");
    app->add_option("--mc-samples", s.mc_samples, "Monte-Carlo sample count");
    app->add_option("--seed", s.seed, "random seed");
    app->add_option("--threads", s.threads, "worker threads (0 = all cores)");
    app->add_option("--out", s.out, "output directory");
}

PipelineConfig resolve(const Shared& s, CLI::App* app) {
    KeyValue kv;
    try {
        if (!s.config.empty()) kv = KeyValue::load(s.config);
        auto put = [&](const char* flag, const char* key, const std::string& v) {
            if (app->count(flag)) kv.set(key, v);
        };
        put("--input", "input", s.input);
        put("--family", "family", s.family);
        put("--innovation", "innovation", s.innovation);
        put("--beta", "beta", s.beta);
        put("--weights", "weights", s.weights);
        put("--window", "window", s.window);
        put("--mc-samples", "mc_samples", s.mc_samples);
        put("--seed", "seed", s.seed);
        put("--threads", "threads", s.threads);
        put("--out", "out", s.out);
        auto cfg = PipelineConfig::from_kv(kv);
        cfg.validate();
        return cfg;
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

ReturnTable load_data(const PipelineConfig& cfg) {
    if (cfg.input.empty()) throw UsageError("--input is required");
    auto prices = read_prices_file(cfg.input);
    auto data = to_returns(prices).select(cfg.assets);
    std::cerr << "ingest: " << data.rows() << " returns for " << data.dim() << " assets";
    if (data.dropped_rows) std::cerr << ", dropped " << data.dropped_rows << " rows with missing prices";
    std::cerr << '\n';
    return data;
}

std::ofstream open_out(const PipelineConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out);
    const auto path = fs::path(cfg.out) / name;
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    std::cerr << "wrote " << path.string() << '\n';
    return os;
}

void save_models(const PipelineConfig& cfg, const FittedModels& fm) {
    KeyValue kv;
    write_models(fm, kv);
    auto os = open_out(cfg, "models.kv");
    os << "# fitted AR(1)-GARCH(1,1) margins and copulas\n";
    kv.write(os);
}

void report_errors(const std::vector<std::string>& errs) {
    for (const auto& e : errs) std::cerr << "error: " << e << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Copula-based CCVaR for Archimedean copulas"};
    app.require_subcommand(1);

    Shared sh;
    std::string models_path;
    double theta = 1.57;
    int dim = 7;
    std::size_t rows = 1361, n = 1000;

    auto* c_ingest = app.add_subcommand("ingest", "negative log-returns and descriptive statistics");
    auto* c_margins = app.add_subcommand("fit-margins", "AR(1)-GARCH(1,1) fits and PIT panels");
    auto* c_copula = app.add_subcommand("fit-copula", "copula ML fits on the PIT panel");
    auto* c_risk = app.add_subcommand("risk", "one-step-ahead VaR, CVaR and CCVaR");
    auto* c_back = app.add_subcommand("backtest", "rolling-window risk forecasts");
    auto* c_sweep = app.add_subcommand("sweep", "CCVaR against beta and theta with uniform margins");
    auto* c_sample = app.add_subcommand("sample", "draw a copula sample");
    auto* c_synth = app.add_subcommand("synth", "synthetic price panel (copula + GARCH margins)");
    for (auto* c : {c_ingest, c_margins, c_copula, c_risk, c_back, c_sweep, c_sample, c_synth}) add_shared(c, sh);
    c_risk->add_option("--models", models_path, "reuse fitted models instead of refitting");
    for (auto* c : {c_sample, c_synth}) {
        c->add_option("--theta", theta, "copula parameter");
        c->add_option("--dim", dim, "dimension");
    }
    c_sample->add_option("--n", n, "sample size");
    c_synth->add_option("--rows", rows, "price rows");

    CLI11_PARSE(app, argc, argv);
    auto* cmd = app.get_subcommands().front();
    try {
        const auto t0 = std::chrono::steady_clock::now();
        auto cfg = resolve(sh, cmd);
        if (cmd == c_ingest) {
            const auto data = load_data(cfg);
            auto r = open_out(cfg, "returns.csv");
            write_returns_csv(data, r);
            auto d = open_out(cfg, "descriptive.csv");
            write_descriptive_csv(data, d);
        } else if (cmd == c_margins) {
            const auto data = load_data(cfg);
            auto only = cfg;
            only.families.clear();
            const auto fm = fit_models(only, data);
            auto os = open_out(cfg, "margins.csv");
            write_margin_fit_csv(fm, os);
            for (const auto& ms : fm.margins) {
                if (!ms.error.empty()) {
                    std::cerr << "error: " << ms.error << '\n';
                    continue;
                }
                auto ps = open_out(cfg, "pit_" + std::string(to_string(ms.kind)) + ".csv");
                write_panel_csv(pit_panel(ms.models, data), ps);
            }
            save_models(cfg, fm);
        } else if (cmd == c_copula) {
            const auto data = load_data(cfg);
            const auto fm = fit_models(cfg, data);
            auto os = open_out(cfg, "copula_fit.csv");
            write_copula_fit_csv(fm, cfg, os);
            save_models(cfg, fm);
        } else if (cmd == c_risk) {
            FittedModels fm;
            if (!models_path.empty()) {
                fm = read_models(KeyValue::load(models_path), cfg);
            } else {
                fm = fit_models(cfg, load_data(cfg));
                save_models(cfg, fm);
            }
            const auto rep = evaluate_risk(cfg, fm);
            auto os = open_out(cfg, "risk.csv");
            write_risk_csv(rep, os);
            auto ss = open_out(cfg, "family_spread.csv");
            write_spread_csv(family_spreads(rep), ss);
            report_errors(rep.errors);
        } else if (cmd == c_back) {
            const auto rep = backtest(cfg, load_data(cfg));
            auto os = open_out(cfg, "backtest.csv");
            write_backtest_csv(rep, os);
            std::cerr << "backtest: " << rep.windows << " windows, " << rep.failed_cells << " failed cells\n";
            report_errors(rep.errors);
        } else if (cmd == c_sweep) {
            auto a = open_out(cfg, "sweep_beta.csv");
            write_sweep_csv(sweep_beta(cfg.quad), a);
            auto b = open_out(cfg, "sweep_theta.csv");
            write_sweep_csv(sweep_theta(cfg.quad), b);
        } else if (cmd == c_sample) {
            if (cfg.families.size() != 1) throw UsageError("sample needs exactly one --family");
            const CopulaSpec spec(cfg.families.front(), cfg.families.front() == Family::Independence ? 0.0 : theta, dim);
            auto os = open_out(cfg, "sample.csv");
            write_panel_csv(sample_copula(spec, n, cfg.seed, cfg.threads), os);
        } else if (cmd == c_synth) {
            SyntheticMarket mk;
            const auto fam = app.get_subcommand("synth")->count("--family") ? cfg.families.front() : Family::Gumbel;
            mk.copula = CopulaSpec(fam, fam == Family::Independence ? 0.0 : theta, dim);
            mk.rows = rows;
            mk.seed = cfg.seed;
            auto os = open_out(cfg, "prices.csv");
            write_prices_csv(synthesize_prices(mk), os);
        }
        std::cerr << "done in " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                  << " s\n";
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
