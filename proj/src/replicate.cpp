#include "shadowlab/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <tuple>

#include "shadowlab/errors.hpp"
#include "shadowlab/pseudo.hpp"
#include "shadowlab/shadow.hpp"

namespace shadowlab {

double ReplicationReport::pass_rate() const {
    if (runs.empty()) return 0.0;
    const auto ok = std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return r.passed; });
    return static_cast<double>(ok) / static_cast<double>(runs.size());
}

nlohmann::json ReplicationReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["success"] = success;
    if (certificate) j["certificate"] = certificate->to_json();
    if (!runs.empty()) {
        double worst = 0.0;
        for (const auto& r : runs) {
            if (r.bound > 0.0) worst = std::max(worst, r.sup_dist / r.bound);
        }
        j["runs"] = runs.size();
        j["pass_rate"] = pass_rate();
        j["worst_dist_to_bound"] = worst;
    }
    j["details"] = details;
    return j;
}

std::string ReplicationReport::to_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto j = to_json();
    os << "name = " << name << "\n";
    os << "success = " << (success ? "true" : "false") << "\n";
    if (!runs.empty()) {
        os << "runs = " << runs.size() << "\n";
        os << "pass_rate = " << pass_rate() << "\n";
        os << "worst_dist_to_bound = " << j["worst_dist_to_bound"].get<double>() << "\n";
    }
    if (certificate) {
        os << "certificate.route = " << to_string(certificate->route) << "\n";
        os << "certificate.eps0 = " << certificate->eps0 << "\n";
        os << "certificate.kappa = " << certificate->kappa << "\n";
        os << "certificate.status = " << (certificate->exact ? "exact" : "evidence") << "\n";
    }
    for (const auto& [key, value] : details.items()) {
        os << key << " = ";
        if (value.is_number_float()) {
            os << value.get<double>();
        } else if (value.is_string()) {
            os << value.get<std::string>();
        } else {
            os << value.dump();
        }
        os << "\n";
    }
    return os.str();
}

void write_report(const ReplicationReport& report, const std::filesystem::path& dir, bool timestamp) {
    std::filesystem::create_directories(dir);
    auto open = [&dir](const std::string& name) {
        std::ofstream f(dir / name);
        if (!f) throw Error("cannot write " + (dir / name).string());
        return f;
    };
    auto j = report.to_json();
    if (timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["generated"] = buf;
    }
    if (report.certificate) open("certificate.json") << report.certificate->to_json().dump(2) << "\n";
    open("report.json") << j.dump(2) << "\n";
    open("summary.txt") << report.to_text();
    if (!report.runs.empty()) {
        auto f = open("runs.csv");
        f << "seed,sigma,sup_dist,bound,residual,max_ratio,iterations,strict_bound,passed\n" << std::setprecision(17);
        for (const auto& r : report.runs) {
            f << r.seed << "," << r.sigma << "," << r.sup_dist << "," << r.bound << "," << r.residual << ","
              << r.max_ratio << "," << r.iterations << "," << r.strict_bound << "," << r.passed << "\n";
        }
    }
    for (const auto& [name, text] : report.tables) open(name) << text;
}

namespace {

RunRecord record(std::uint64_t seed, const ShadowResult& r) {
    RunRecord rec;
    rec.seed = seed;
    rec.sigma = r.sigma;
    rec.sup_dist = r.sup_dist;
    rec.bound = r.bound;
    rec.residual = r.residual;
    rec.max_ratio = r.max_ratio();
    rec.iterations = r.iterations;
    rec.strict_bound = r.strict_bound;
    rec.passed = r.passed;
    return rec;
}

std::string shadow_table(const ShadowResult& r) {
    std::ostringstream os;
    write_shadow_csv(os, r, NormKind::Inf);
    return os.str();
}

// Draws a contained pseudo-orbit, retrying with fresh seeds. `draw` maps an
// RNG to (x0, T, amplitude).
template <class Draw>
std::pair<PseudoSolution, std::uint64_t> contained_orbit(const OdeSystem& sys, const Region& H, std::uint64_t base,
                                                         const ReplicateOptions& opts, int& retries, Draw&& draw) {
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        const std::uint64_t seed = base + static_cast<std::uint64_t>(attempt);
        std::mt19937_64 rng(seed);
        const auto [x0, T, amp] = draw(rng);
        PerturbOptions po;
        po.tol = opts.tol;
        try {
            return {perturbed_orbit(sys, x0, T, amp, seed, H, po), seed};
        } catch (const ContainmentError&) {
            ++retries;
        }
    }
    throw ContainmentError("no contained pseudo-orbit found after " + std::to_string(opts.max_attempts) + " attempts",
                           0.0);
}

void finish_positive(ReplicationReport& rep, int retries) {
    rep.details["containment_retries"] = retries;
    rep.details["containment"] = "checked at grid points only";
    rep.success = !rep.runs.empty() && rep.pass_rate() == 1.0;
}

}  // namespace

ReplicationReport replicate_exm_positive(double rho, std::optional<double> delta_nbhd, const ReplicateOptions& opts) {
    if (!(rho > 0.0)) throw ArgumentError("rho must be positive");
    Certificate cert = delta_nbhd ? certify_ball(1.0, 1.0, 2.0 * (rho + *delta_nbhd), rho, *delta_nbhd,
                                                 DichotomyKind::Contraction)
                                  : certify_gen_perturb(1.0, 1.0, {0.0, 2.0}, rho, DichotomyKind::Contraction);
    const auto sys = exm_system();
    const auto H = Region::ball(Vector::Zero(1), rho);
    cert.assumptions.region = H.describe();
    const auto d = DichotomyData::contraction(1, 1.0, 1.0);

    ReplicationReport rep;
    rep.name = "exm_positive";
    rep.certificate = cert;
    rep.details["rho"] = rho;
    int retries = 0;
    PicardOptions po;
    po.tol = opts.tol;
    po.max_iter = 20000;
    for (int r = 0; r < opts.runs; ++r) {
        auto [y, seed] = contained_orbit(sys, H, opts.seed + 1000ULL * static_cast<std::uint64_t>(r), opts, retries,
                                         [&](std::mt19937_64& rng) {
                                             std::uniform_real_distribution<double> x(-0.2 * rho, 0.8 * rho),
                                                 a(0.1, 1.0);
                                             return std::tuple{Vector::Constant(1, x(rng)), 2.0,
                                                               a(rng) * cert.eps0 * (1.0 - 1e-9)};
                                         });
        const auto res = shadow_dichotomy(sys, d, y, cert, po);
        rep.runs.push_back(record(seed, res));
        if (r == 0) rep.tables.emplace_back("run0_shadow.csv", shadow_table(res));
    }
    finish_positive(rep, retries);
    return rep;
}

double exm_gap(double gamma, double delta, double T) {
    // y - x_c is increasing in t, so the sup sits at an endpoint.
    const double at_end = delta * std::tanh(delta * T) - gamma / (gamma * T + 1.0);
    return std::max(std::abs(gamma), std::abs(at_end));
}

ReplicationReport replicate_exm_counterexample(double delta, double kappa_candidate, double T) {
    if (!(kappa_candidate > 0.0)) throw ArgumentError("kappa candidate must be positive");
    if (!(delta > 0.0 && delta < std::min(1.0, 1.0 / kappa_candidate))) {
        throw ArgumentError("need 0 < delta < min(1, 1/kappa)");
    }
    if (!(T >= 10.0 / delta * (1.0 - 1e-12))) throw ArgumentError("need T >= 10/delta");

    ReplicationReport rep;
    rep.name = "exm_counterexample";
    const auto tgrid = uniform_grid(0.0, T, 2001);
    const auto y = exm_pseudosolution(delta, tgrid);

    // Grid enumeration of initial values c in [-1, 1/2] through the closed
    // form; solutions that blow up before T are excluded.
    std::vector<double> cs;
    for (int i = 0; i <= 3000; ++i) cs.push_back(-1.0 + 1.5 * i / 3000.0);
    for (int i = 0; i <= 2000; ++i) cs.push_back(-0.5 + std::pow(10.0, -9.0 + 9.0 * i / 2000.0));
    std::sort(cs.begin(), cs.end());
    long excluded = 0, survivors = 0;
    double grid_min = std::numeric_limits<double>::infinity(), grid_argmin = 0.0;
    for (double c : cs) {
        double sup = 0.0;
        try {
            for (std::size_t i = 0; i < tgrid.size(); ++i) {
                sup = std::max(sup, std::abs(exm_exact(c, tgrid[i]) - y.traj.x[i](0)));
            }
        } catch (const DomainError&) {
            ++excluded;
            continue;
        }
        ++survivors;
        if (sup < grid_min) {
            grid_min = sup;
            grid_argmin = c;
        }
    }

    // Exact minimiser: the gap is max(gamma, D(T) with gamma), crossing where
    // gamma = delta tanh(delta T) - gamma / (gamma T + 1).
    const double yT = delta * std::tanh(delta * T);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid < yT - mid / (mid * T + 1.0) ? lo : hi) = mid;
    }
    const double gamma_star = 0.5 * (lo + hi);
    const double min_gap = std::min(grid_min, exm_gap(gamma_star, delta, T));

    const double tol = 1e-9;
    const double required = delta * (1.0 - std::exp(-2.0 * delta * T)) / (1.0 + std::exp(-2.0 * delta * T)) - tol;
    const double sigma = y.sigma;
    rep.details["delta"] = delta;
    rep.details["T"] = T;
    rep.details["sigma"] = sigma;
    rep.details["kappa_candidate"] = kappa_candidate;
    rep.details["kappa_delta_sq"] = kappa_candidate * delta * delta;
    rep.details["min_gap"] = min_gap;
    rep.details["min_gap_grid"] = grid_min;
    rep.details["argmin_c_grid"] = grid_argmin;
    rep.details["argmin_c_exact"] = gamma_star - 0.5;
    rep.details["required_gap"] = required;
    rep.details["meets_required_gap"] = min_gap >= required;
    rep.details["limit_gap"] = delta;
    rep.details["kappa_max_certified"] = min_gap / (delta * delta);
    rep.details["survivors"] = survivors;
    rep.details["excluded_blowup"] = excluded;
    rep.details["failure_certified"] = min_gap > kappa_candidate * delta * delta;
    rep.success = min_gap > kappa_candidate * delta * delta;

    std::ostringstream os;
    os << "t,y,x_best,dist\n" << std::setprecision(17);
    for (std::size_t i = 0; i < tgrid.size(); ++i) {
        const double xb = exm_exact(gamma_star - 0.5, tgrid[i]);
        os << tgrid[i] << "," << y.traj.x[i](0) << "," << xb << "," << std::abs(xb - y.traj.x[i](0)) << "\n";
    }
    rep.tables.emplace_back("closest_solution.csv", os.str());
    return rep;
}

ReplicationReport replicate_revisited(double rho, const ReplicateOptions& opts) {
    if (!(rho > 0.0)) throw ArgumentError("rho must be positive");
    if (!(rho < 0.5)) throw NotApplicableError("no admissible delta in (0, 1/2 - rho) for rho >= 1/2");
    const double delta = 0.5 * (0.5 - rho);
    const auto sys = exm_system();
    const auto H = Region::half_line(1, -rho);
    const auto m = estimate_m(sys, H, delta, NormKind::Inf);
    auto cert = certify_lognorm(m.value, delta);
    cert.exact = m.exact;
    cert.assumptions.rho = rho;
    cert.assumptions.region = H.describe();

    ReplicationReport rep;
    rep.name = "revisited";
    rep.certificate = cert;
    rep.details["rho"] = rho;
    rep.details["m"] = m.value;
    int retries = 0;
    for (int r = 0; r < opts.runs; ++r) {
        auto [y, seed] = contained_orbit(sys, H, opts.seed + 1000ULL * static_cast<std::uint64_t>(r), opts, retries,
                                         [&](std::mt19937_64& rng) {
                                             std::uniform_real_distribution<double> x(-0.5 * rho, 3.0), a(0.1, 1.0);
                                             return std::tuple{Vector::Constant(1, x(rng)), 2.0,
                                                               a(rng) * cert.eps0 * (1.0 - 1e-9)};
                                         });
        const auto res = shadow_lognorm(sys, y, cert, H, opts.tol);
        rep.runs.push_back(record(seed, res));
        if (r == 0) rep.tables.emplace_back("run0_shadow.csv", shadow_table(res));
    }
    finish_positive(rep, retries);
    return rep;
}

ReplicationReport replicate_si(double c, double epsilon, double kappa_candidate, double T,
                               const ReplicateOptions& opts) {
    if (!(c >= 0.0 && c < 1.0)) throw ArgumentError("c must lie in [0, 1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("epsilon must lie in (0, 1)");
    if (!(T > 0.0)) throw ArgumentError("horizon must be positive");
    const auto sys = si_system();
    ReplicationReport rep;
    rep.details["c"] = c;

    if (c > 0.0) {
        rep.name = "si_positive";
        const double delta = c / 10.0;
        const auto H = Region::simplex_gamma(c);
        const auto m = estimate_m(sys, H, delta, NormKind::Inf);
        auto cert = certify_lognorm(m.value, delta);
        cert.exact = m.exact;
        cert.assumptions.region = H.describe();
        rep.certificate = cert;
        rep.details["m"] = m.value;
        int retries = 0;
        for (int r = 0; r < opts.runs; ++r) {
            auto [y, seed] = contained_orbit(
                sys, H, opts.seed + 1000ULL * static_cast<std::uint64_t>(r), opts, retries,
                [&](std::mt19937_64& rng) {
                    // S + I relaxes to 1 at unit rate, so Gamma_c is left at
                    // t = ln((1 - s0) / c); stay well inside that.
                    std::uniform_real_distribution<double> s(0.05, 0.7 * (1.0 - c)), frac(0.2, 0.8), a(0.1, 1.0);
                    const double s0 = s(rng), f = frac(rng);
                    Vector x0(2);
                    x0 << (1.0 - f) * s0, f * s0;
                    const double horizon = std::min(T, 0.8 * std::log((1.0 - s0) / c));
                    return std::tuple{x0, horizon, a(rng) * cert.eps0 * (1.0 - 1e-9)};
                });
            const auto res = shadow_lognorm(sys, y, cert, H, opts.tol);
            rep.runs.push_back(record(seed, res));
            if (r == 0) rep.tables.emplace_back("run0_shadow.csv", shadow_table(res));
        }
        finish_positive(rep, retries);
        return rep;
    }

    rep.name = "si_negative";
    const double r = std::sqrt(epsilon);
    Vector p(2);
    p << 1.0 - r, r;
    const auto grid = uniform_grid(0.0, T, 10001);
    const auto y = constant_pseudosolution(sys, p, grid);
    Vector shift(2);
    shift << -epsilon, epsilon;
    const double eq_residual = vector_norm(sys.g(0.0, p) + shift, NormKind::Inf);

    try {
        (void)estimate_m(sys, Region::simplex_gamma(0.0), 0.0, NormKind::Inf);
        rep.details["m_hypothesis_violated"] = false;
    } catch (const HypothesisViolated& e) {
        rep.details["m_hypothesis_violated"] = true;
        rep.details["m_witness"] = std::vector<double>(e.witness().data(), e.witness().data() + e.witness().size());
    }

    IntegrateOptions io;
    io.tol = opts.tol;
    const auto x = integrate_on(sys, p, grid, io);
    if (x.blew_up) throw Error("SI solution from P_eps failed to reach T");
    const double dist = vector_norm(x.x.back() - p, NormKind::Inf);
    double max_increase = -std::numeric_limits<double>::infinity();
    bool strict = true;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double inc = x.x[i + 1](1) - x.x[i](1);
        max_increase = std::max(max_increase, inc);
        if (x.x[i](0) < 1.0 - 1e-12 && !(inc < 0.0)) strict = false;
    }
    const Vector& end = x.x.back();
    const double to_e_start = std::min(std::abs(p(1)), std::abs(1.0 - p(0)));
    const double to_e_end = std::min(std::abs(end(1)), std::abs(1.0 - end(0)));

    rep.details["epsilon"] = epsilon;
    rep.details["T"] = T;
    rep.details["sigma_analytic"] = epsilon;
    rep.details["sigma_measured"] = y.sigma;
    rep.details["perturbed_equilibrium_residual"] = eq_residual;
    rep.details["distance_at_T"] = dist;
    rep.details["distance_closed_form"] = r * r * T / (1.0 + r * T);
    rep.details["half_sqrt_eps"] = 0.5 * r;
    rep.details["kappa_candidate"] = kappa_candidate;
    rep.details["kappa_eps"] = kappa_candidate * epsilon;
    rep.details["kappa_max_certified"] = dist / epsilon;
    rep.details["lyapunov_max_increase"] = max_increase;
    rep.details["lyapunov_nonincreasing"] = max_increase <= 1e-9;
    rep.details["lyapunov_strict_while_s_below_1"] = strict;
    rep.details["distance_to_E_start"] = to_e_start;
    rep.details["distance_to_E_end"] = to_e_end;
    rep.details["failure_certified"] = dist > kappa_candidate * epsilon;
    rep.success = dist > kappa_candidate * epsilon;

    std::ostringstream os;
    write_trajectory_csv(os, x);
    rep.tables.emplace_back("solution_from_p_eps.csv", os.str());
    return rep;
}

}  // namespace shadowlab
