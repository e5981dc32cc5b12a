#ifndef CCVAR_DATA_HPP
#define CCVAR_DATA_HPP

// Price CSV ingestion, negative log-returns (x100), descriptive statistics and a
// synthetic market generator (copula-coupled GARCH innovations).

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ccvar/error.hpp"
#include "ccvar/garch.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/innovations.hpp"
#include "ccvar/sampling.hpp"

namespace ccvar {

struct PriceTable {
    std::vector<std::string> symbols;
    std::vector<std::string> dates;
    std::vector<std::vector<double>> prices; // prices[asset][row]
    std::size_t dropped_rows = 0;            // rows with a missing price

    std::size_t rows() const { return dates.size(); }
};

/// Negative log-returns r_t = -100 ln(P_t / P_{t-1}); dates[t] is the date of P_t.
struct ReturnTable {
    std::vector<std::string> symbols;
    std::vector<std::string> dates;
    std::vector<ReturnSeries> columns;
    std::size_t dropped_rows = 0;

    std::size_t rows() const { return dates.size(); }
    std::size_t dim() const { return symbols.size(); }

    /// Keeps only the named assets, in the given order.
    ReturnTable select(const std::vector<std::string>& names) const {
        if (names.empty()) return *this;
        ReturnTable out{{}, dates, {}, dropped_rows};
        for (const auto& n : names) {
            auto it = std::find(symbols.begin(), symbols.end(), n);
            if (it == symbols.end()) throw ParameterError("unknown asset column '" + n + "'");
            out.symbols.push_back(n);
            out.columns.push_back(columns[static_cast<std::size_t>(it - symbols.begin())]);
        }
        return out;
    }

    /// Rows [lo, hi).
    ReturnTable slice(std::size_t lo, std::size_t hi) const {
        if (lo > hi || hi > rows()) throw IndexError("ReturnTable::slice: range out of bounds");
        ReturnTable out{symbols, {dates.begin() + lo, dates.begin() + hi}, {}, 0};
        for (const auto& c : columns) out.columns.emplace_back(c.begin() + lo, c.begin() + hi);
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t\"");
        const auto e = s.find_last_not_of(" \t\"");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

inline bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null" || s == ".";
}

inline bool valid_iso_date(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) return false;
    return std::chrono::year_month_day(std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)).ok();
}

} // namespace detail

/// Reads `date,SYM1,...,SYMd`. Rows with a missing price are dropped and counted.
inline PriceTable read_prices(std::istream& is, const std::string& source = "<prices>") {
    std::string line;
    int lineno = 0;
    auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };
    PriceTable out;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        const auto head = detail::split_csv_line(line);
        if (head.size() < 2 || head[0] != "date") throw ParseError(where() + "expected header 'date,SYM1,...'");
        out.symbols.assign(head.begin() + 1, head.end());
        break;
    }
    if (out.symbols.empty()) throw ParseError(source + ": empty file");
    out.prices.resize(out.symbols.size());
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != out.symbols.size() + 1)
            throw ParseError(where() + "expected " + std::to_string(out.symbols.size() + 1) + " fields, got " +
                             std::to_string(f.size()));
        if (!detail::valid_iso_date(f[0])) throw ParseError(where() + "'" + f[0] + "' is not an ISO date");
        if (!out.dates.empty() && !(out.dates.back() < f[0]))
            throw ParseError(where() + "dates must be strictly ascending");
        std::vector<double> row(out.symbols.size());
        bool missing = false;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto& s = f[j + 1];
            if (detail::is_missing(s)) {
                missing = true;
                continue;
            }
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), row[j]);
            if (ec != std::errc() || p != s.data() + s.size())
                throw ParseError(where() + "'" + s + "' is not a number");
            if (!(row[j] > 0.0) || !std::isfinite(row[j]))
                throw DomainError(where() + "price of " + out.symbols[j] + " must be positive");
        }
        if (missing) {
            ++out.dropped_rows;
            continue;
        }
        out.dates.push_back(f[0]);
        for (std::size_t j = 0; j < row.size(); ++j) out.prices[j].push_back(row[j]);
    }
    return out;
}

inline PriceTable read_prices_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_prices(in, path);
}

inline ReturnTable to_returns(const PriceTable& p) {
    if (p.rows() < 2) throw InsufficientSamplesError("to_returns: need at least two price rows");
    ReturnTable out{p.symbols, {p.dates.begin() + 1, p.dates.end()}, {}, p.dropped_rows};
    for (const auto& col : p.prices) {
        ReturnSeries r(col.size() - 1);
        for (std::size_t t = 1; t < col.size(); ++t) r[t - 1] = -100.0 * std::log(col[t] / col[t - 1]);
        out.columns.push_back(std::move(r));
    }
    return out;
}

inline ReturnTable ingest(const std::string& path) { return to_returns(read_prices_file(path)); }

inline void write_returns_csv(const ReturnTable& r, std::ostream& os) {
    os << "date";
    for (const auto& s : r.symbols) os << ',' << s;
    os << '\n';
    os.precision(17);
    for (std::size_t t = 0; t < r.rows(); ++t) {
        os << r.dates[t];
        for (const auto& c : r.columns) os << ',' << c[t];
        os << '\n';
    }
}

struct Descriptive {
    double mean = 0.0, std = 0.0, min = 0.0, median = 0.0, max = 0.0;
    double kurtosis = 0.0; // excess
    double skewness = 0.0;
};

inline Descriptive describe(const ReturnSeries& x) {
    if (x.size() < 2) throw InsufficientSamplesError("describe: need at least two observations");
    const double n = static_cast<double>(x.size());
    Descriptive out;
    for (double v : x) out.mean += v;
    out.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double e = v - out.mean, e2 = e * e;
        m2 += e2;
        m3 += e2 * e;
        m4 += e2 * e2;
    }
    out.std = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    out.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    auto s = x;
    std::sort(s.begin(), s.end());
    out.min = s.front();
    out.max = s.back();
    const std::size_t h = s.size() / 2;
    out.median = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
    return out;
}

/// One row per statistic, one column per asset.
inline void write_descriptive_csv(const ReturnTable& r, std::ostream& os) {
    std::vector<Descriptive> d;
    for (const auto& c : r.columns) d.push_back(describe(c));
    os << "statistic";
    for (const auto& s : r.symbols) os << ',' << s;
    os << '\n';
    os.precision(6);
    auto row = [&](const char* name, double Descriptive::*field) {
        os << name;
        for (const auto& v : d) os << ',' << v.*field;
        os << '\n';
    };
    row("mean", &Descriptive::mean);
    row("std", &Descriptive::std);
    row("min", &Descriptive::min);
    row("median", &Descriptive::median);
    row("max", &Descriptive::max);
    row("kurtosis", &Descriptive::kurtosis);
    row("skewness", &Descriptive::skewness);
}

// ---------------------------------------------------------------------------
// synthetic market

struct SyntheticMarket {
    CopulaSpec copula{Family::Gumbel, 1.57, 7};
    std::vector<MarginModel> margins; // one per asset; empty means a default t(6) AR(1)-GARCH(1,1)
    std::size_t rows = 1361;          // price rows, i.e. rows - 1 returns
    std::string start_date = "2015-01-05";
    double start_price = 100.0;
    std::uint64_t seed = 1;
};

/// Asset i of the default market: mildly heterogeneous AR(1)-GARCH(1,1) with t(6) innovations.
inline MarginModel default_synthetic_margin(std::size_t i) {
    const double k = static_cast<double>(i % 7);
    return MarginModel::ar1_garch11(-0.04 + 0.005 * k, 0.02 - 0.01 * (k / 6.0), 0.08 + 0.02 * k, 0.06 + 0.005 * k,
                                    0.90 - 0.005 * k, Innovation::student_t(6.0));
}

/// Business days (Mon-Fri) starting at the given ISO date.
inline std::vector<std::string> business_days(const std::string& start, std::size_t n) {
    if (!detail::valid_iso_date(start)) throw ParseError("business_days: '" + start + "' is not an ISO date");
    int y = 0;
    unsigned m = 0, d = 0;
    std::sscanf(start.c_str(), "%4d-%2u-%2u", &y, &m, &d);
    std::chrono::sys_days day{std::chrono::year(y) / std::chrono::month(m) / std::chrono::day(d)};
    std::vector<std::string> out;
    out.reserve(n);
    while (out.size() < n) {
        const std::chrono::weekday wd{day};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
            const std::chrono::year_month_day ymd{day};
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
            out.emplace_back(buf);
        }
        day += std::chrono::days(1);
    }
    return out;
}

/// Copula-coupled GARCH returns turned into prices: z_{t,i} = F_z^{-1}(U_{t,i}) with U
/// drawn from the copula, then P_t = P_{t-1} exp(-r_t / 100).
inline PriceTable synthesize_prices(const SyntheticMarket& mk) {
    const int d = mk.copula.dim();
    auto margins = mk.margins;
    if (margins.empty())
        for (int i = 0; i < d; ++i) margins.push_back(default_synthetic_margin(static_cast<std::size_t>(i)));
    if (static_cast<int>(margins.size()) != d)
        throw DimensionError("synthesize_prices: need one margin model per copula dimension");
    if (mk.rows < 2) throw ParameterError("synthesize_prices: need at least two rows");
    const std::size_t n = mk.rows - 1 + kGarchBurnIn;
    const auto u = sample_copula(mk.copula, n, mk.seed, 1);
    PriceTable out;
    out.dates = business_days(mk.start_date, mk.rows);
    for (int i = 0; i < d; ++i) {
        out.symbols.push_back("A" + std::to_string(i + 1));
        const auto& m = margins[static_cast<std::size_t>(i)];
        std::vector<double> z(n);
        for (std::size_t t = 0; t < n; ++t) z[t] = m.innovation.quantile(u(t, static_cast<std::size_t>(i)));
        const auto r = simulate_garch_from(m, z);
        std::vector<double> p(mk.rows);
        p[0] = mk.start_price;
        for (std::size_t t = 1; t < mk.rows; ++t) p[t] = p[t - 1] * std::exp(-r[t - 1] / 100.0);
        out.prices.push_back(std::move(p));
    }
    return out;
}

inline void write_prices_csv(const PriceTable& p, std::ostream& os) {
    os << "date";
    for (const auto& s : p.symbols) os << ',' << s;
    os << '\n';
    os.precision(12);
    for (std::size_t t = 0; t < p.rows(); ++t) {
        os << p.dates[t];
        for (const auto& c : p.prices) os << ',' << c[t];
        os << '\n';
    }
}

} // namespace ccvar

#endif
