#include "shadowlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "shadowlab/errors.hpp"
#include "shadowlab/lognorm.hpp"

namespace shadowlab {

std::string to_string(Route r) {
    switch (r) {
        case Route::T1: return "T1";
        case Route::T2: return "T2";
        case Route::BallCor: return "BallCor";
        case Route::GenPerturb: return "GenPerturb";
        case Route::PolyPerturb: return "PolyPerturb";
        case Route::LogNorm: return "LogNorm";
    }
    return "?";
}

Route parse_route(const std::string& name) {
    for (Route r : {Route::T1, Route::T2, Route::BallCor, Route::GenPerturb, Route::PolyPerturb, Route::LogNorm}) {
        if (to_string(r) == name) return r;
    }
    throw ArgumentError("unknown certificate route '" + name + "'");
}

nlohmann::json Certificate::to_json() const {
    nlohmann::json a;
    auto put = [&a](const char* key, const std::optional<double>& v) {
        if (v) a[key] = *v;
    };
    put("N", assumptions.N);
    put("lambda", assumptions.lambda);
    put("L", assumptions.L);
    put("m", assumptions.m);
    put("delta", assumptions.delta);
    put("rho", assumptions.rho);
    if (!assumptions.growth.empty()) a["growth"] = assumptions.growth;
    if (assumptions.kind) a["kind"] = to_string(*assumptions.kind);
    if (!assumptions.region.empty()) a["region"] = assumptions.region;
    a["norm"] = to_string(assumptions.norm);

    nlohmann::json j;
    j["route"] = to_string(route);
    j["eps0"] = eps0;
    j["kappa"] = kappa;
    j["assumptions"] = a;
    j["status"] = exact ? "exact" : "evidence";
    j["samples"] = samples;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    return j;
}

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(name) + " must be positive and finite");
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(name) + " must be nonnegative and finite");
}

Certificate from_kappa(double kappa, double delta, Route route) {
    Certificate c;
    c.kappa = kappa;
    c.eps0 = delta / kappa;
    c.route = route;
    c.assumptions.delta = delta;
    return c;
}

}  // namespace

double growth_threshold(double N, double lambda, DichotomyKind kind) {
    return kind == DichotomyKind::Dichotomy ? lambda / (2.0 * N) : lambda / N;
}

double eval_growth(const std::vector<double>& growth, double r) {
    double acc = 0.0;
    for (auto it = growth.rbegin(); it != growth.rend(); ++it) acc = acc * r + *it;
    return acc;
}

Certificate certify_t1(double N, double lambda, double L, double delta) {
    require_positive(N, "N");
    require_positive(lambda, "lambda");
    require_positive(delta, "delta");
    require_nonnegative(L, "L");
    const double bound = lambda / (2.0 * N);
    if (!(L < bound)) {
        throw NotApplicableError("dichotomy route needs L < lambda/(2N) = " + num(bound) + ", got L = " + num(L));
    }
    auto c = from_kappa(2.0 * N / (lambda - 2.0 * N * L), delta, Route::T1);
    c.assumptions.N = N;
    c.assumptions.lambda = lambda;
    c.assumptions.L = L;
    c.assumptions.kind = DichotomyKind::Dichotomy;
    return c;
}

Certificate certify_t2(double N, double lambda, double L, double delta, DichotomyKind kind) {
    if (kind == DichotomyKind::Dichotomy) {
        throw ArgumentError("the contraction/expansion route needs kind Contraction or Expansion");
    }
    require_positive(N, "N");
    require_positive(lambda, "lambda");
    require_positive(delta, "delta");
    require_nonnegative(L, "L");
    const double bound = lambda / N;
    if (!(L < bound)) {
        throw NotApplicableError("contraction/expansion route needs L < lambda/N = " + num(bound) + ", got L = " +
                                 num(L));
    }
    auto c = from_kappa(N / (lambda - N * L), delta, Route::T2);
    c.assumptions.N = N;
    c.assumptions.lambda = lambda;
    c.assumptions.L = L;
    c.assumptions.kind = kind;
    return c;
}

Certificate certify_ball(double N, double lambda, double L, double rho, double delta, DichotomyKind kind) {
    require_positive(rho, "rho");
    auto c = kind == DichotomyKind::Dichotomy ? certify_t1(N, lambda, L, delta)
                                              : certify_t2(N, lambda, L, delta, kind);
    c.route = Route::BallCor;
    c.assumptions.rho = rho;
    c.assumptions.region = "ball(center=0, radius=" + num(rho) + ")";
    return c;
}

Certificate certify_gen_perturb(double N, double lambda, const std::vector<double>& growth, double rho,
                                DichotomyKind kind) {
    if (growth.empty()) throw ArgumentError("growth polynomial needs at least one coefficient");
    for (double g : growth) require_nonnegative(g, "growth coefficient");
    require_positive(N, "N");
    require_positive(lambda, "lambda");
    require_positive(rho, "rho");
    const double theta = growth_threshold(N, lambda, kind);
    const double p_rho = eval_growth(growth, rho);
    const bool constant = std::all_of(growth.begin() + 1, growth.end(), [](double g) { return g == 0.0; });
    if (!(p_rho < theta)) {
        std::string why = "growth bound p(rho) = " + num(p_rho) + " is not below the threshold " + num(theta);
        if (!(growth.front() < theta) || constant) {
            why += "; L1 = " + num(growth.front()) + " already reaches it, so no rho is admissible";
        } else {
            double lo = 0.0, hi = rho;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (eval_growth(growth, mid) < theta ? lo : hi) = mid;
            }
            why += "; admissible radii satisfy rho < " + num(hi);
        }
        throw NotApplicableError(why);
    }
    double delta = rho;  // p is flat: every delta keeps p(rho + delta) = p(rho)
    if (!constant) {
        const double target = 0.5 * (p_rho + theta);
        double hi = std::max(rho, 1.0);
        while (eval_growth(growth, rho + hi) < target) hi *= 2.0;
        double lo = 0.0;
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            (eval_growth(growth, rho + mid) <= target ? lo : hi) = mid;
        }
        delta = lo;
    }
    const double L = eval_growth(growth, rho + delta);
    auto c = kind == DichotomyKind::Dichotomy ? certify_t1(N, lambda, L, delta)
                                              : certify_t2(N, lambda, L, delta, kind);
    c.route = growth.size() <= 2 ? Route::GenPerturb : Route::PolyPerturb;
    c.assumptions.rho = rho;
    c.assumptions.growth = growth;
    c.assumptions.region = "ball(center=0, radius=" + num(rho) + ")";
    return c;
}

Certificate certify_lognorm(double m, double delta) {
    require_positive(m, "m");
    require_positive(delta, "delta");
    Certificate c;
    c.eps0 = m * delta;
    c.kappa = 1.0 / m;
    c.route = Route::LogNorm;
    c.assumptions.m = m;
    c.assumptions.delta = delta;
    return c;
}

namespace {

// Smallest coordinate over N_delta(H) for the scalar regions that have one.
std::optional<double> scalar_lower_edge(const Region& H, double delta) {
    if (H.dim() != 1) return std::nullopt;
    switch (H.shape()) {
        case RegionShape::Ball: return H.center()(0) - H.radius() - delta;
        case RegionShape::Box:
        case RegionShape::HalfLine: return H.lower()(0) - delta;
        default: return std::nullopt;
    }
}

std::optional<double> scalar_abs_max(const Region& H, double delta) {
    if (H.dim() != 1) return std::nullopt;
    switch (H.shape()) {
        case RegionShape::Ball: return std::abs(H.center()(0)) + H.radius() + delta;
        case RegionShape::Box: return std::max(std::abs(H.lower()(0)), std::abs(H.upper()(0))) + delta;
        default: return std::nullopt;
    }
}

template <class F>
SupEstimate sampled_sup(const std::vector<Vector>& pts, const SampleOptions& opts, F&& value) {
    SupEstimate est;
    est.value = -std::numeric_limits<double>::infinity();
    est.samples = static_cast<long>(pts.size());
    const std::vector<double> times = opts.times.empty() ? std::vector<double>{0.0} : opts.times;
    for (const auto& x : pts) {
        for (double t : times) {
            const double v = value(t, x);
            if (v > est.value) {
                est.value = v;
                est.witness = x;
                est.witness_t = t;
            }
        }
    }
    return est;
}

}  // namespace

SupEstimate estimate_lipschitz(const OdeSystem& sys, const Region& H, double delta, NormKind k,
                               const SampleOptions& opts) {
    if (!sys.split) throw StructureError("system '" + sys.name + "' has no semilinear split A + f");
    if (H.dim() != sys.n) throw DimensionError("region and system dimensions differ");
    if (delta < 0.0) throw ArgumentError("delta must be nonnegative");
    if (opts.closed_form && sys.tag == SystemTag::Exm) {
        if (auto r = scalar_abs_max(H, delta)) {
            SupEstimate est;
            est.value = 2.0 * *r;
            est.exact = true;
            est.witness = Vector::Constant(1, *r);
            return est;
        }
    }
    std::mt19937_64 rng(opts.seed);
    const auto pts = H.sample_hull(delta, static_cast<std::size_t>(std::max(1L, opts.samples)), rng);
    const auto& fx = sys.split->fx;
    return sampled_sup(pts, opts, [&fx, k](double t, const Vector& x) { return matrix_norm(fx(t, x), k); });
}

SupEstimate estimate_m(const OdeSystem& sys, const Region& H, double delta, NormKind k, const SampleOptions& opts) {
    if (H.dim() != sys.n) throw DimensionError("region and system dimensions differ");
    if (delta < 0.0) throw ArgumentError("delta must be nonnegative");
    SupEstimate est;
    bool done = false;
    if (opts.closed_form && sys.tag == SystemTag::Exm) {
        // mu(g_x) = -2 (x + 1/2) is largest at the lowest point.
        if (auto lo = scalar_lower_edge(H, delta)) {
            est.value = 2.0 * (*lo + 0.5);
            est.witness = Vector::Constant(1, *lo);
            est.exact = true;
            done = true;
        }
    } else if (opts.closed_form && sys.tag == SystemTag::Si && H.shape() == RegionShape::SimplexGamma &&
               k == NormKind::Inf) {
        // On S, I >= 0, mu_inf(g_x) = S + I - 1; the delta-neighbourhood in the
        // max norm raises the worst value by 2 delta at the shifted vertex.
        const double c = H.gamma_c();
        est.value = c - 2.0 * delta;
        est.witness = Vector(2);
        est.witness << 1.0 - c + delta, delta;
        est.exact = true;
        done = true;
    }
    if (!done) {
        std::mt19937_64 rng(opts.seed);
        const auto pts = H.sample_neighborhood(delta, static_cast<std::size_t>(std::max(1L, opts.samples)), rng);
        const auto& gx = sys.gx;
        est = sampled_sup(pts, opts, [&gx, k](double t, const Vector& x) { return mu_closed(gx(t, x), k); });
        est.value = -est.value;
    }
    if (!(est.value > 0.0)) {
        throw HypothesisViolated("sup of mu(g_x) over the delta-neighbourhood is " + num(-est.value) +
                                     " >= 0, so no m > 0 exists",
                                 est.witness, -est.value);
    }
    return est;
}

}  // namespace shadowlab
