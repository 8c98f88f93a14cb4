#include "shadowlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace shadowlab {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_number(std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last) throw ArgumentError("'" + t + "' is not a number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<double> parse_row(const std::string& text) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_number(tok));
    return out;
}

}  // namespace

Matrix parse_matrix(const std::string& text) {
    const auto rows = split(text, ';');
    std::vector<std::vector<double>> vals;
    for (const auto& r : rows) {
        if (trim(r).empty()) continue;
        vals.push_back(parse_row(r));
    }
    if (vals.empty()) throw ArgumentError("empty matrix");
    const std::size_t cols = vals.front().size();
    Matrix m(static_cast<Eigen::Index>(vals.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i].size() != cols) throw ArgumentError("matrix rows have different lengths");
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[i][j];
    }
    return m;
}

Vector parse_vector(const std::string& text) {
    const auto v = parse_row(text);
    if (v.empty()) throw ArgumentError("empty vector");
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Polynomial parse_polynomial(const std::string& text, Eigen::Index n) {
    Polynomial p;
    for (const auto& term : split(text, ';')) {
        const std::string t = trim(term);
        if (t.empty()) continue;
        const auto open = t.find('['), close = t.find(']');
        if (open == std::string::npos || close == std::string::npos || close < open) {
            throw ArgumentError("polynomial term '" + t + "' needs the form 'coef [e1 ... en]'");
        }
        Monomial m;
        m.coef = parse_number(t.substr(0, open));
        for (double e : parse_row(t.substr(open + 1, close - open - 1))) {
            if (e < 0 || e != static_cast<int>(e)) throw ArgumentError("exponents must be nonnegative integers");
            m.exponents.push_back(static_cast<int>(e));
        }
        if (static_cast<Eigen::Index>(m.exponents.size()) != n) {
            throw ArgumentError("term '" + t + "' needs " + std::to_string(n) + " exponents");
        }
        if (!trim(t.substr(close + 1)).empty()) throw ArgumentError("trailing text after term '" + t + "'");
        p.push_back(std::move(m));
    }
    return p;
}

Config Config::parse(std::istream& in, std::string source) {
    Config cfg;
    cfg.source_ = std::move(source);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty() || s.front() == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(cfg.source_, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError(cfg.source_, line, "empty section name");
            if (cfg.section_lines_.count(section)) {
                throw ConfigError(cfg.source_, line, "section [" + section + "] appears twice");
            }
            cfg.section_lines_[section] = line;
            cfg.sections_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(cfg.source_, line, "expected 'key = value'");
        if (section.empty()) throw ConfigError(cfg.source_, line, "key outside of any [section]");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError(cfg.source_, line, "missing key before '='");
        auto& sec = cfg.sections_[section];
        if (sec.count(key)) throw ConfigError(cfg.source_, line, "duplicate key '" + key + "' in [" + section + "]");
        sec[key] = Entry{trim(s.substr(eq + 1)), line};
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path.string(), 0, "cannot open file");
    return parse(f, path.string());
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::optional<Config::Entry> Config::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto e = s->second.find(key);
    if (e == s->second.end()) return std::nullopt;
    return e->second;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& what) const {
    if (const auto e = find(section, key)) throw ConfigError(source_, e->line, "[" + section + "] " + key + ": " + what);
    const auto s = section_lines_.find(section);
    throw ConfigError(source_, s == section_lines_.end() ? 0 : s->second, "[" + section + "] " + key + ": " + what);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const auto e = find(section, key);
    if (!e) fail(section, key, "required key is missing");
    return e->value;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    const auto e = find(section, key);
    return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        return parse_number(v);
    } catch (const ArgumentError& err) {
        fail(section, key, err.what());
    }
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    return find(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!find(section, key)) return fallback;
    const double v = get_double(section, key);
    if (v != static_cast<double>(static_cast<long>(v))) fail(section, key, "expected an integer");
    return static_cast<long>(v);
}

Vector Config::get_vector(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        return parse_vector(v);
    } catch (const ArgumentError& err) {
        fail(section, key, err.what());
    }
}

Matrix Config::get_matrix(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        return parse_matrix(v);
    } catch (const ArgumentError& err) {
        fail(section, key, err.what());
    }
}

NormKind norm_from_config(const Config& cfg) {
    const std::string name = cfg.get_string("norm", "kind", "inf");
    try {
        return parse_norm(name);
    } catch (const ArgumentError& err) {
        cfg.fail("norm", "kind", err.what());
    }
}

OdeSystem system_from_config(const Config& cfg) {
    const std::string name = cfg.get_string("system", "name");
    RegistryParams params;
    for (const char* key : {"a", "b"}) {
        if (cfg.find("system", key)) params.scalars[key] = cfg.get_double("system", key);
    }
    if (cfg.find("system", "A")) {
        params.a = cfg.get_matrix("system", "A");
        if (params.a->rows() != params.a->cols()) cfg.fail("system", "A", "matrix must be square");
        const auto n = params.a->rows();
        if (name == "linear_poly") {
            for (Eigen::Index i = 1; i <= n; ++i) {
                const std::string key = "f" + std::to_string(i);
                const std::string text = cfg.get_string("system", key, "");
                try {
                    params.poly.push_back(parse_polynomial(text, n));
                } catch (const ArgumentError& err) {
                    cfg.fail("system", key, err.what());
                }
            }
        }
    }
    try {
        return registry(name, params);
    } catch (const Error& err) {
        cfg.fail("system", "name", err.what());
    }
}

Region region_from_config(const Config& cfg, Eigen::Index n, NormKind k) {
    const std::string shape = cfg.get_string("region", "shape", "whole");
    auto dim_check = [&](const Vector& v, const char* key) {
        if (v.size() != n) cfg.fail("region", key, "expected " + std::to_string(n) + " entries");
    };
    try {
        if (shape == "ball") {
            const Vector c = cfg.find("region", "center") ? cfg.get_vector("region", "center") : Vector::Zero(n);
            dim_check(c, "center");
            return Region::ball(c, cfg.get_double("region", "radius"), k);
        }
        if (shape == "box") {
            const Vector lo = cfg.get_vector("region", "lo"), hi = cfg.get_vector("region", "hi");
            dim_check(lo, "lo");
            dim_check(hi, "hi");
            return Region::box(lo, hi, k);
        }
        if (shape == "half_line") {
            return Region::half_line(n, cfg.get_double("region", "a"), k, cfg.get_double("region", "span", 10.0));
        }
        if (shape == "gamma") {
            if (n != 2) cfg.fail("region", "shape", "gamma needs a two-dimensional system");
            return Region::simplex_gamma(cfg.get_double("region", "c"), k);
        }
        if (shape == "whole") return Region::whole(n, k, cfg.get_double("region", "span", 10.0));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& err) {
        cfg.fail("region", "shape", err.what());
    }
    cfg.fail("region", "shape", "unknown shape '" + shape + "' (ball, box, half_line, gamma, whole)");
}

DichotomyData dichotomy_from_config(const Config& cfg, const OdeSystem& sys, NormKind k) {
    if (!sys.split) cfg.fail("system", "name", "system has no linear part A");
    const std::string p = cfg.get_string("constants", "P", "");
    try {
        if (p == "spectral") {
            if (!sys.split->a.is_constant()) cfg.fail("constants", "P", "spectral splitting needs a constant A");
            auto d = spectral_dichotomy(sys.split->a.constant_value(), k);
            if (cfg.find("constants", "N")) d.N = cfg.get_double("constants", "N");
            if (cfg.find("constants", "lambda")) d.lambda = cfg.get_double("constants", "lambda");
            return d;
        }
        const double N = cfg.get_double("constants", "N");
        const double lambda = cfg.get_double("constants", "lambda");
        const std::string kind = cfg.get_string("constants", "kind", "dichotomy");
        DichotomyKind dk{};
        try {
            dk = parse_dichotomy_kind(kind);
        } catch (const Error& err) {
            cfg.fail("constants", "kind", err.what());
        }
        if (dk == DichotomyKind::Contraction) return DichotomyData::contraction(sys.n, N, lambda);
        if (dk == DichotomyKind::Expansion) return DichotomyData::expansion(sys.n, N, lambda);
        const Matrix pm = cfg.get_matrix("constants", "P");
        if (pm.rows() != sys.n || pm.cols() != sys.n) cfg.fail("constants", "P", "projection has the wrong size");
        return DichotomyData::constant_projection(pm, N, lambda);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& err) {
        cfg.fail("constants", "N", err.what());
    }
}

std::vector<double> grid_from_config(const Config& cfg) {
    const double t0 = cfg.get_double("grid", "t0", 0.0);
    const double t1 = cfg.get_double("grid", "t1");
    const long points = cfg.get_int("grid", "points", 201);
    if (!(t1 > t0)) cfg.fail("grid", "t1", "must exceed t0");
    if (points < 2) cfg.fail("grid", "points", "need at least 2 points");
    return uniform_grid(t0, t1, static_cast<std::size_t>(points));
}

std::uint64_t seed_from_config(const Config& cfg) {
    const long s = cfg.get_int("pseudo", "seed", 1);
    if (s < 0) cfg.fail("pseudo", "seed", "seed must be nonnegative");
    return static_cast<std::uint64_t>(s);
}

PseudoSolution pseudo_from_config(const Config& cfg, const OdeSystem& sys, const Region& H, NormKind k,
                                  std::uint64_t seed) {
    const std::string kind = cfg.get_string("pseudo", "kind");
    const double tol = cfg.get_double("solver", "tol", 1e-10);
    auto vec = [&](const char* key) {
        Vector v = cfg.get_vector("pseudo", key);
        if (v.size() != sys.n) cfg.fail("pseudo", key, "expected " + std::to_string(sys.n) + " entries");
        return v;
    };
    try {
        if (kind == "perturbed") {
            PerturbOptions po;
            po.points = static_cast<std::size_t>(cfg.get_int("pseudo", "points", 0));
            po.tol = tol;
            po.norm = k;
            return perturbed_orbit(sys, vec("x0"), cfg.get_double("pseudo", "T"), cfg.get_double("pseudo", "amplitude"),
                                   seed, H, po);
        }
        if (kind == "oscillating") {
            const Vector c = cfg.find("pseudo", "center") ? vec("center") : Vector::Zero(sys.n);
            return oscillating_pseudosolution(sys, c, cfg.get_double("pseudo", "T"),
                                              static_cast<std::size_t>(cfg.get_int("pseudo", "points", 2001)),
                                              cfg.get_double("pseudo", "sigma"), seed, k);
        }
        if (kind == "exm") {
            const auto grid = uniform_grid(0.0, cfg.get_double("pseudo", "T"),
                                           static_cast<std::size_t>(cfg.get_int("pseudo", "points", 2001)));
            return exm_pseudosolution(cfg.get_double("pseudo", "delta"), grid);
        }
        if (kind == "constant") {
            const auto grid = uniform_grid(0.0, cfg.get_double("pseudo", "T"),
                                           static_cast<std::size_t>(cfg.get_int("pseudo", "points", 201)));
            return constant_pseudosolution(sys, vec("point"), grid, k);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const ContainmentError&) {
        throw;
    } catch (const ArgumentError& err) {
        cfg.fail("pseudo", "kind", err.what());
    }
    cfg.fail("pseudo", "kind", "unknown pseudosolution kind '" + kind + "' (perturbed, oscillating, exm, constant)");
}

}  // namespace shadowlab
