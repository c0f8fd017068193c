#ifndef BOSEPAIR_IO_HPP
#define BOSEPAIR_IO_HPP

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tabulated.hpp"

namespace bosepair {

/**
 * Reads a measured structure factor: two numeric columns (q in 1/Angstrom,
 * S dimensionless), '#' comment lines, strictly increasing q, at least 8
 * rows. Low side extrapolates linearly through the first two nodes (phonon
 * behaviour), high side holds the last value.
 */
inline TabulatedFunction ingest_sq(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open structure-factor file: " + path);
    std::vector<double> q, s;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = 0;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i == line.size() || line[i] == '#') continue;
        std::istringstream row(line);
        double qi = 0.0, si = 0.0;
        if (!(row >> qi >> si))
            throw DataError("malformed structure-factor row", lineno);
        std::string extra;
        if (row >> extra)
            throw DataError("structure-factor row has extra columns", lineno);
        if (!(qi > 0.0)) throw DataError("wave number must be positive", lineno);
        if (!(si > 0.0))
            throw DataError("structure factor must be positive", lineno);
        if (!q.empty() && !(qi > q.back()))
            throw DataError("wave numbers must increase strictly", lineno);
        q.push_back(qi);
        s.push_back(si);
    }
    if (q.size() < 8)
        throw DataError("structure-factor table needs at least 8 rows", lineno);
    return TabulatedFunction(std::move(q), std::move(s), Extrapolation::linear(),
                             Extrapolation::constant());
}

/// %.12g float rendering, locale-free; deterministic across runs.
inline std::string fmt_g(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.12g", v);
    return b;
}

inline std::string fmt_g17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

/**
 * Flat key=value configuration with [section] headers and '#' comments.
 * Values are kept as strings; typed getters validate on access and report
 * the defining line on parse failures.
 */
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file: " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    static KeyValueConfig parse_string(const std::string& text) {
        KeyValueConfig c;
        std::istringstream in(text);
        std::string line, section;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw DataError("unterminated section header", lineno);
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty()) throw DataError("empty section name", lineno);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw DataError("expected key = value", lineno);
            const std::string key = trim(t.substr(0, eq));
            const std::string val = trim(t.substr(eq + 1));
            if (key.empty()) throw DataError("empty key", lineno);
            c.values_[section + "." + key] = val;
            c.lines_[section + "." + key] = lineno;
        }
        return c;
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ValidationError("config: missing [" + section + "] " + key);
        return it->second;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    double number(const std::string& section, const std::string& key) const {
        return to_number(section, key, get(section, key));
    }

    double number_or(const std::string& section, const std::string& key,
                     double fallback) const {
        return has(section, key) ? number(section, key) : fallback;
    }

    long integer_or(const std::string& section, const std::string& key,
                    long fallback) const {
        if (!has(section, key)) return fallback;
        const double v = number(section, key);
        const long r = static_cast<long>(v);
        if (static_cast<double>(r) != v)
            throw DataError("expected an integer for [" + section + "] " + key,
                            line_of(section, key));
        return r;
    }

    std::vector<double> list(const std::string& section,
                             const std::string& key) const {
        const std::string raw = get(section, key);
        std::vector<double> out;
        std::string item;
        std::istringstream in(raw);
        while (std::getline(in, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            out.push_back(to_number(section, key, t));
        }
        if (out.empty())
            throw DataError("empty list for [" + section + "] " + key,
                            line_of(section, key));
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, long> lines_;

    long line_of(const std::string& section, const std::string& key) const {
        const auto it = lines_.find(section + "." + key);
        return it == lines_.end() ? 0 : it->second;
    }

    double to_number(const std::string& section, const std::string& key,
                     const std::string& text) const {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw DataError("expected a number for [" + section + "] " + key,
                            line_of(section, key));
        }
        if (used != text.size())
            throw DataError("trailing characters in [" + section + "] " + key,
                            line_of(section, key));
        return v;
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }
};

} // namespace bosepair

#endif
