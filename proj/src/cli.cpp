#include "shadowlab/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shadowlab/certify.hpp"
#include "shadowlab/config.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/lognorm.hpp"
#include "shadowlab/replicate.hpp"
#include "shadowlab/shadow.hpp"

namespace shadowlab {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kError = 2;

struct Globals {
    std::optional<std::uint64_t> seed;
    bool no_timestamp = false;
};

std::uint64_t resolve_seed(const Globals& g, std::uint64_t from_config) {
    if (g.seed) return *g.seed;
    if (const char* env = std::getenv("SHADOWLAB_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') throw ArgumentError("SHADOWLAB_SEED must be a nonnegative integer");
        return v;
    }
    return from_config;
}

void stamp(nlohmann::json& j, const Globals& g) {
    if (g.no_timestamp) return;
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["generated"] = buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ArgumentError("cannot open matrix file " + path);
    std::string line, rows;
    while (std::getline(f, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
        rows += line + ";";
    }
    return parse_matrix(rows);
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// Command bodies. Each returns an exit code.

int cmd_lognorm(const std::string& file, const std::string& norm, bool limit, std::ostream& out) {
    const Matrix a = read_matrix_csv(file);
    std::vector<NormKind> kinds;
    if (norm == "all") {
        kinds.assign(std::begin(kAllNorms), std::end(kAllNorms));
    } else {
        kinds.push_back(parse_norm(norm));
    }
    for (NormKind k : kinds) {
        out << to_string(k) << " " << num(mu_closed(a, k));
        if (limit) out << " " << num(mu_limit(a, k));
        out << "\n";
    }
    return kOk;
}

struct CertifyArgs {
    std::string route;
    std::string config;
    std::optional<double> N, lambda, L, delta, m, rho;
    std::string growth;
    std::string kind;
    std::string out;
};

int cmd_certify(const CertifyArgs& a, const Globals& g, std::ostream& out) {
    std::optional<Config> cfg;
    if (!a.config.empty()) cfg = Config::load(a.config);
    auto pick = [&](const std::optional<double>& flag, const char* key) -> std::optional<double> {
        if (flag) return flag;
        if (cfg && cfg->find("constants", key)) return cfg->get_double("constants", key);
        return std::nullopt;
    };
    auto need = [&](const std::optional<double>& v, const char* key) {
        if (!v) throw ArgumentError(std::string("missing --") + key);
        return *v;
    };
    const auto N = pick(a.N, "N"), lambda = pick(a.lambda, "lambda"), delta = pick(a.delta, "delta"),
               rho = pick(a.rho, "rho");
    auto L = pick(a.L, "L");
    auto m = pick(a.m, "m");
    std::string kind = a.kind;
    if (kind.empty() && cfg) kind = cfg->get_string("constants", "kind", "");
    const DichotomyKind dk = kind.empty() ? DichotomyKind::Dichotomy : parse_dichotomy_kind(kind);
    const std::uint64_t seed = resolve_seed(g, cfg ? seed_from_config(*cfg) : 1);

    // Sampled constants when a system and region are configured.
    std::optional<SupEstimate> est;
    auto sampled = [&](bool want_m) {
        if (!cfg || !cfg->has_section("system")) return;
        const auto sys = system_from_config(*cfg);
        const NormKind k = norm_from_config(*cfg);
        const auto H = region_from_config(*cfg, sys.n, k);
        SampleOptions so;
        so.seed = seed;
        so.samples = cfg->get_int("solver", "samples", 2000);
        est = want_m ? estimate_m(sys, H, need(delta, "delta"), k, so)
                     : estimate_lipschitz(sys, H, need(delta, "delta"), k, so);
    };

    Certificate c;
    if (a.route == "lognorm") {
        if (!m) {
            sampled(true);
            if (est) m = est->value;
        }
        c = certify_lognorm(need(m, "m"), need(delta, "delta"));
    } else if (a.route == "t1" || a.route == "t2" || a.route == "ball") {
        if (!L) {
            sampled(false);
            if (est) L = est->value;
        }
        if (a.route == "t1") {
            c = certify_t1(need(N, "N"), need(lambda, "lambda"), need(L, "L"), need(delta, "delta"));
        } else if (a.route == "t2") {
            c = certify_t2(need(N, "N"), need(lambda, "lambda"), need(L, "L"), need(delta, "delta"),
                           kind.empty() ? DichotomyKind::Contraction : dk);
        } else {
            c = certify_ball(need(N, "N"), need(lambda, "lambda"), need(L, "L"), need(rho, "rho"),
                             need(delta, "delta"), dk);
        }
    } else if (a.route == "gen") {
        std::string growth = a.growth;
        if (growth.empty() && cfg) growth = cfg->get_string("constants", "growth", "");
        if (growth.empty()) throw ArgumentError("missing --growth");
        const Vector coeffs = parse_vector(growth);
        c = certify_gen_perturb(need(N, "N"), need(lambda, "lambda"),
                                std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size()), need(rho, "rho"),
                                dk);
    } else {
        throw ArgumentError("unknown route '" + a.route + "' (t1, t2, ball, gen, lognorm)");
    }
    if (est) {
        c.exact = est->exact;
        c.samples = est->exact ? 0 : est->samples;
        if (!est->exact) c.seed = seed;
    }
    if (cfg && cfg->has_section("norm")) c.assumptions.norm = norm_from_config(*cfg);
    auto j = c.to_json();
    stamp(j, g);
    out << j.dump(2) << "\n";
    if (!a.out.empty()) write_file(a.out, j.dump(2) + "\n");
    return kOk;
}

struct RunArgs {
    std::string route;
    std::string config;
    std::string out;
};

int cmd_shadow(const RunArgs& a, const Globals& g, std::ostream& out) {
    const auto cfg = Config::load(a.config);
    const auto sys = system_from_config(cfg);
    const NormKind k = norm_from_config(cfg);
    const auto H = region_from_config(cfg, sys.n, k);
    const std::uint64_t seed = resolve_seed(g, seed_from_config(cfg));
    const double tol = cfg.get_double("solver", "tol", 1e-10);
    const double delta = cfg.get_double("constants", "delta");
    SampleOptions so;
    so.seed = seed;
    so.samples = cfg.get_int("solver", "samples", 2000);
    const auto y = pseudo_from_config(cfg, sys, H, k, seed);

    Certificate cert;
    ShadowResult res;
    if (a.route == "lognorm") {
        SupEstimate m;
        if (cfg.find("constants", "m")) {
            m.value = cfg.get_double("constants", "m");
            m.exact = true;
        } else {
            m = estimate_m(sys, H, delta, k, so);
        }
        cert = certify_lognorm(m.value, delta);
        cert.exact = m.exact;
        cert.samples = m.exact ? 0 : m.samples;
        res = shadow_lognorm(sys, y, cert, H, tol);
    } else if (a.route == "dichotomy") {
        const auto d = dichotomy_from_config(cfg, sys, k);
        SupEstimate L;
        if (cfg.find("constants", "L")) {
            L.value = cfg.get_double("constants", "L");
            L.exact = true;
        } else {
            L = estimate_lipschitz(sys, H, delta, k, so);
        }
        cert = d.kind == DichotomyKind::Dichotomy ? certify_t1(d.N, d.lambda, L.value, delta)
                                                  : certify_t2(d.N, d.lambda, L.value, delta, d.kind);
        cert.exact = L.exact;
        cert.samples = L.exact ? 0 : L.samples;
        PicardOptions po;
        po.tol = tol;
        po.max_iter = static_cast<int>(cfg.get_int("solver", "max_iter", 500));
        res = shadow_dichotomy(sys, d, y, cert, po);
    } else {
        throw ArgumentError("unknown route '" + a.route + "' (dichotomy, lognorm)");
    }
    cert.assumptions.region = H.describe();
    cert.assumptions.norm = k;
    if (!cert.exact) cert.seed = seed;

    nlohmann::json j = res.to_json();
    j["certificate"] = cert.to_json();
    j["pseudosolution"] = pseudo_json(y);
    stamp(j, g);
    out << j.dump(2) << "\n";
    if (!a.out.empty()) {
        const std::filesystem::path dir(a.out);
        std::ostringstream csv, pcsv;
        write_shadow_csv(csv, res, k);
        write_pseudo_csv(pcsv, y);
        write_file(dir / "shadow.csv", csv.str());
        write_file(dir / "pseudo.csv", pcsv.str());
        write_file(dir / "shadow.json", j.dump(2) + "\n");
        write_file(dir / "certificate.json", cert.to_json().dump(2) + "\n");
    }
    return res.passed ? kOk : kFailure;
}

int cmd_relocate(const RunArgs& a, const Globals& g, std::ostream& out) {
    const auto cfg = Config::load(a.config);
    const auto sys = system_from_config(cfg);
    const NormKind k = norm_from_config(cfg);
    const auto H = region_from_config(cfg, sys.n, k);
    const std::uint64_t seed = resolve_seed(g, seed_from_config(cfg));
    const auto d = dichotomy_from_config(cfg, sys, k);
    const auto y = pseudo_from_config(cfg, sys, H, k, seed);
    RelocateOptions ro;
    ro.tol = cfg.get_double("solver", "tol", 1e-10);
    ro.max_iter = static_cast<int>(cfg.get_int("solver", "max_iter", 2000));
    ro.seed = seed;
    if (cfg.find("constants", "L")) ro.L = cfg.get_double("constants", "L");
    const double rho = cfg.get_double("constants", "rho");
    const auto r = relocate(sys, d, y, rho, ro);
    nlohmann::json j = r.to_json();
    j["rho"] = rho;
    j["sigma_y"] = y.sigma;
    j["within_ball"] = r.sup_norm <= rho;
    stamp(j, g);
    out << j.dump(2) << "\n";
    if (!a.out.empty()) {
        const std::filesystem::path dir(a.out);
        std::ostringstream zcsv;
        write_pseudo_csv(zcsv, r.z);
        write_file(dir / "relocated.csv", zcsv.str());
        write_file(dir / "relocate.json", j.dump(2) + "\n");
    }
    return r.sup_norm <= rho ? kOk : kFailure;
}

struct ReplicateArgs {
    std::string example;
    std::optional<double> rho, delta, kappa, T, c, epsilon;
    int runs = 20;
    std::string out;
};

int cmd_replicate(const ReplicateArgs& a, const Globals& g, std::ostream& out) {
    ReplicateOptions ro;
    ro.runs = a.runs;
    ro.seed = resolve_seed(g, ro.seed);
    ReplicationReport rep;
    if (a.example == "exm") {
        rep = replicate_exm_positive(a.rho.value_or(0.3), a.delta, ro);
    } else if (a.example == "exm-counter") {
        const double delta = a.delta.value_or(0.01);
        rep = replicate_exm_counterexample(delta, a.kappa.value_or(10.0), a.T.value_or(10.0 / delta));
    } else if (a.example == "revisited") {
        rep = replicate_revisited(a.rho.value_or(0.3), ro);
    } else if (a.example == "si") {
        rep = replicate_si(a.c.value_or(0.2), a.epsilon.value_or(1e-4), a.kappa.value_or(40.0), a.T.value_or(100.0),
                           ro);
    } else {
        throw ArgumentError("unknown example '" + a.example + "' (exm, exm-counter, revisited, si)");
    }
    out << rep.to_text();
    if (!a.out.empty()) write_report(rep, a.out, !g.no_timestamp);
    return rep.success ? kOk : kFailure;
}

int cmd_verify(const RunArgs& a, std::ostream& out) {
    const auto cfg = Config::load(a.config);
    const auto sys = system_from_config(cfg);
    const NormKind k = norm_from_config(cfg);
    const auto d = dichotomy_from_config(cfg, sys, k);
    const auto grid = grid_from_config(cfg);
    const auto rep = verify_dichotomy(sys.split->a, d, grid, cfg.get_double("solver", "tol", 1e-8), k);
    out << rep.to_text();
    if (!a.out.empty()) write_file(a.out, rep.to_text());
    return rep.passed() ? kOk : kFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conditional Lipschitz shadowing toolkit"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides config and SHADOWLAB_SEED)");
    app.add_flag("--no-timestamp", g.no_timestamp, "Omit timestamps from JSON output");

    std::string ln_file, ln_norm = "all";
    bool ln_limit = false;
    auto* ln = app.add_subcommand("lognorm", "Logarithmic norms of a CSV matrix");
    ln->add_option("matrix", ln_file, "Matrix file, one row per line")->required();
    ln->add_option("--norm", ln_norm, "inf, one, two or all");
    ln->add_flag("--limit", ln_limit, "Also print the difference-quotient value");

    CertifyArgs ca;
    auto* cert = app.add_subcommand("certify", "Compute (eps0, kappa)");
    cert->add_option("--route", ca.route, "t1, t2, ball, gen or lognorm")->required();
    cert->add_option("config", ca.config, "Optional config file");
    cert->add_option("--N", ca.N);
    cert->add_option("--lambda", ca.lambda);
    cert->add_option("--L", ca.L);
    cert->add_option("--delta", ca.delta);
    cert->add_option("--m", ca.m);
    cert->add_option("--rho", ca.rho);
    cert->add_option("--growth", ca.growth, "Coefficients L1, L2, ...");
    cert->add_option("--kind", ca.kind, "dichotomy, contraction or expansion");
    cert->add_option("--out", ca.out, "Also write the certificate here");

    RunArgs sa;
    auto* sh = app.add_subcommand("shadow", "Construct the shadowing solution");
    sh->add_option("--route", sa.route, "dichotomy or lognorm")->required();
    sh->add_option("config", sa.config)->required();
    sh->add_option("--out", sa.out, "Output directory");

    RunArgs ra;
    auto* rel = app.add_subcommand("relocate", "Relocate a pseudosolution into B_rho(0)");
    rel->add_option("config", ra.config)->required();
    rel->add_option("--out", ra.out, "Output directory");

    ReplicateArgs pa;
    auto* rep = app.add_subcommand("replicate", "Reproduce a worked example");
    rep->add_option("example", pa.example, "exm, exm-counter, revisited or si")->required();
    rep->add_option("--rho", pa.rho);
    rep->add_option("--delta", pa.delta);
    rep->add_option("--kappa", pa.kappa);
    rep->add_option("--T", pa.T);
    rep->add_option("--c", pa.c);
    rep->add_option("--epsilon", pa.epsilon);
    rep->add_option("--runs", pa.runs);
    rep->add_option("--out", pa.out, "Report directory");

    RunArgs va;
    auto* ver = app.add_subcommand("verify-dichotomy", "Check dichotomy conditions on a grid");
    ver->add_option("config", va.config)->required();
    ver->add_option("--out", va.out, "Also write the report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kError;
    }
    if (*seed_opt) g.seed = seed;

    try {
        if (*ln) return cmd_lognorm(ln_file, ln_norm, ln_limit, out);
        if (*cert) return cmd_certify(ca, g, out);
        if (*sh) return cmd_shadow(sa, g, out);
        if (*rel) return cmd_relocate(ra, g, out);
        if (*rep) return cmd_replicate(pa, g, out);
        if (*ver) return cmd_verify(va, out);
    } catch (const NotApplicableError& e) {
        err << "not applicable: " << e.what() << "\n";
        return kFailure;
    } catch (const HypothesisViolated& e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return kFailure;
    } catch (const NonConvergence& e) {
        err << "no convergence: " << e.what() << " (last ratio " << e.last_ratio() << ")\n";
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("shadowlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace shadowlab
