#ifndef CCVAR_KEYVALUE_HPP
#define CCVAR_KEYVALUE_HPP

// Flat "key = value" text blocks for configs and fitted models. '#' starts a comment.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccvar/error.hpp"

namespace ccvar {

class KeyValue {
public:
    bool has(const std::string& key) const { return find(key) != nullptr; }

    void set(const std::string& key, const std::string& value) {
        if (auto* v = find_mut(key))
            *v = value;
        else
            entries_.emplace_back(key, value);
    }

    void set(const std::string& key, double value) {
        std::ostringstream os;
        os << std::setprecision(17) << value;
        set(key, os.str());
    }

    void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }

    const std::string& get(const std::string& key) const {
        if (const auto* v = find(key)) return *v;
        throw ParseError("missing key '" + key + "'");
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto* v = find(key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& key) const { return to_double(key, get(key)); }
    double get_double_or(const std::string& key, double fallback) const {
        const auto* v = find(key);
        return v ? to_double(key, *v) : fallback;
    }

    long long get_int(const std::string& key) const {
        const auto& s = get(key);
        long long out = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ParseError("key '" + key + "': '" + s + "' is not an integer");
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    /// Copies every entry of other, overriding existing keys.
    void merge(const KeyValue& other) {
        for (const auto& [k, v] : other.entries_) set(k, v);
    }

    static KeyValue parse(std::istream& is, const std::string& source = "<input>") {
        KeyValue kv;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto text = trim(line);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
            const auto key = trim(text.substr(0, eq));
            if (key.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": empty key");
            kv.set(key, trim(text.substr(eq + 1)));
        }
        return kv;
    }

    static KeyValue load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open '" + path + "'");
        return parse(in, path);
    }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& key, const std::string& s) {
        if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        double out = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ParseError("key '" + key + "': '" + s + "' is not a number");
        return out;
    }

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return &v;
        return nullptr;
    }
    std::string* find_mut(const std::string& key) {
        for (auto& [k, v] : entries_)
            if (k == key) return &v;
        return nullptr;
    }

    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace ccvar

#endif
