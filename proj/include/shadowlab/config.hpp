#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/errors.hpp"
#include "shadowlab/linear_dynamics.hpp"
#include "shadowlab/pseudo.hpp"
#include "shadowlab/region.hpp"
#include "shadowlab/systems.hpp"

namespace shadowlab {

/// Malformed configuration; the message starts with `source:line:`.
class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// Flat sectioned key-value file:
///
///   # comment
///   [system]
///   name = linear_poly
///   A = -1, 0; 0, 1
///
/// Keys are unique per section. Values keep everything after the first '='.
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static Config parse(std::istream& in, std::string source = "<config>");
    static Config load(const std::filesystem::path& path);

    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] std::optional<Entry> find(const std::string& section, const std::string& key) const;
    [[nodiscard]] const std::string& source() const { return source_; }

    [[nodiscard]] std::string get_string(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& section, const std::string& key,
                                         const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& section, const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& section, const std::string& key, double fallback) const;
    [[nodiscard]] long get_int(const std::string& section, const std::string& key, long fallback) const;
    [[nodiscard]] Vector get_vector(const std::string& section, const std::string& key) const;
    [[nodiscard]] Matrix get_matrix(const std::string& section, const std::string& key) const;

    /// Throws ConfigError pointing at the key (or the section header, or line 0).
    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const;

private:
    std::string source_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::map<std::string, int> section_lines_;
};

/// "1, 2; 3, 4" (rows separated by ';'). Throws ArgumentError.
[[nodiscard]] Matrix parse_matrix(const std::string& text);
/// "1, 2, 3" or "1 2 3". Throws ArgumentError.
[[nodiscard]] Vector parse_vector(const std::string& text);
/// "0.5 [2 0]; -1 [1 1]": coefficient followed by exponents, terms separated
/// by ';'. Throws ArgumentError.
[[nodiscard]] Polynomial parse_polynomial(const std::string& text, Eigen::Index n);

[[nodiscard]] NormKind norm_from_config(const Config& cfg);
/// [system] name plus its parameters (a, b, A, f1..fn).
[[nodiscard]] OdeSystem system_from_config(const Config& cfg);
/// [region] shape = ball | box | half_line | gamma | whole.
[[nodiscard]] Region region_from_config(const Config& cfg, Eigen::Index n, NormKind k);
/// [constants] N, lambda, kind, and P (a matrix, or `spectral`).
[[nodiscard]] DichotomyData dichotomy_from_config(const Config& cfg, const OdeSystem& sys, NormKind k);
/// [grid] t0, t1, points.
[[nodiscard]] std::vector<double> grid_from_config(const Config& cfg);
/// [pseudo] kind = perturbed | oscillating | exm | constant.
[[nodiscard]] PseudoSolution pseudo_from_config(const Config& cfg, const OdeSystem& sys, const Region& H,
                                                NormKind k, std::uint64_t seed);
/// [pseudo] seed, defaulting to 1.
[[nodiscard]] std::uint64_t seed_from_config(const Config& cfg);

}  // namespace shadowlab
