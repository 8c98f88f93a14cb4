#include "shadowlab/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>

#include "shadowlab/errors.hpp"

namespace shadowlab {

double ShadowResult::max_ratio() const {
    return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

nlohmann::json ShadowResult::to_json() const {
    nlohmann::json j;
    j["sup_dist"] = sup_dist;
    j["bound"] = bound;
    j["sigma"] = sigma;
    j["tolerance"] = tolerance;
    j["quadrature_error"] = quadrature_error;
    j["truncation_error"] = truncation_error;
    j["iterations"] = iterations;
    j["max_ratio"] = max_ratio();
    j["residual"] = residual;
    j["passed"] = passed;
    j["strict_bound"] = strict_bound;
    j["hypothesis_refuted"] = hypothesis_refuted;
    j["points"] = solution.size();
    j["horizon"] = solution.horizon;
    return j;
}

void write_shadow_csv(std::ostream& os, const ShadowResult& r, NormKind k) {
    const auto n = r.solution.dim();
    os << "t";
    for (Eigen::Index j = 0; j < n; ++j) os << ",y" << (j + 1);
    for (Eigen::Index j = 0; j < n; ++j) os << ",x" << (j + 1);
    os << ",dist\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.solution.size(); ++i) {
        os << r.solution.t[i];
        for (Eigen::Index j = 0; j < n; ++j) os << "," << r.pseudo.x[i](j);
        for (Eigen::Index j = 0; j < n; ++j) os << "," << r.solution.x[i](j);
        os << "," << vector_norm(r.solution.x[i] - r.pseudo.x[i], k) << "\n";
    }
}

nlohmann::json RelocateResult::to_json() const {
    nlohmann::json j;
    j["L"] = L;
    j["eps"] = eps;
    j["iterations"] = iterations;
    j["max_ratio"] = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    j["error_mismatch"] = error_mismatch;
    j["sup_norm"] = sup_norm;
    j["truncation_error"] = truncation_error;
    j["sigma_z"] = z.sigma;
    return j;
}

namespace {

using Grid = std::vector<double>;
using Field = std::vector<Vector>;

// Discretised dichotomy operator on a grid:
//   (F phi)(t) = int_0^t T(t,s) P(s) phi(s) ds - int_t^tau T(t,s) (I - P(s)) phi(s) ds,
// evaluated by trapezoid sweeps along the one-step transition maps.
class GridOperator {
public:
    GridOperator(const LinearSystem& a, const DichotomyData& d, const Grid& t) : t_(t), kind_(d.kind) {
        const auto steps = step_transitions(a, t_);
        phi_ = steps.forward;
        psi_ = steps.backward;
        const auto n = a.dim();
        for (double ti : t_) {
            Matrix p = d.P(ti);
            q_.push_back(Matrix::Identity(n, n) - p);
            p_.push_back(std::move(p));
        }
    }

    [[nodiscard]] Field apply(const Field& f) const {
        const std::size_t K = t_.size();
        const auto n = f.front().size();
        Field out(K, Vector::Zero(n));
        if (kind_ != DichotomyKind::Expansion) {
            Vector u = Vector::Zero(n);
            for (std::size_t i = 0; i + 1 < K; ++i) {
                const double h = t_[i + 1] - t_[i];
                u = p_[i + 1] * (phi_[i] * (u + 0.5 * h * (p_[i] * f[i])) + 0.5 * h * (p_[i + 1] * f[i + 1]));
                out[i + 1] = u;
            }
        }
        if (kind_ != DichotomyKind::Contraction) {
            Vector v = Vector::Zero(n);
            for (std::size_t i = K - 1; i-- > 0;) {
                const double h = t_[i + 1] - t_[i];
                v = q_[i] * (psi_[i] * (v + 0.5 * h * (q_[i + 1] * f[i + 1])) + 0.5 * h * (q_[i] * f[i]));
                out[i] -= v;
            }
        }
        return out;
    }

private:
    Grid t_;
    DichotomyKind kind_;
    std::vector<Matrix> phi_, psi_, p_, q_;
};

double sup_diff(const Field& a, const Field& b, NormKind k) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, vector_norm(a[i] - b[i], k));
    return m;
}

Grid refine(const Grid& g) {
    Grid r;
    r.reserve(2 * g.size() - 1);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        r.push_back(g[i]);
        r.push_back(0.5 * (g[i] + g[i + 1]));
    }
    r.push_back(g.back());
    return r;
}

struct LevelSolution {
    Field z;
    int iterations = 0;
    std::vector<double> ratios;
};

// Iterates z <- (1 - omega) z + omega * F(kernel(z)) from z = 0.
template <class Kernel>
LevelSolution fixed_point(const GridOperator& op, std::size_t K, Eigen::Index n, Kernel&& kernel, double omega,
                          double tol, int max_iter, double ratio_floor, NormKind k, const char* what) {
    LevelSolution s;
    s.z.assign(K, Vector::Zero(n));
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= max_iter; ++it) {
        Field fz = op.apply(kernel(s.z));
        if (omega != 1.0) {
            for (std::size_t i = 0; i < K; ++i) fz[i] = (1.0 - omega) * s.z[i] + omega * fz[i];
        }
        const double diff = sup_diff(fz, s.z, k);
        if (!std::isfinite(diff)) throw NonConvergence(std::string(what) + ": iterates became non-finite", it, diff);
        if (prev > ratio_floor) s.ratios.push_back(diff / prev);
        s.z = std::move(fz);
        s.iterations = it;
        if (diff <= tol) return s;
        prev = diff;
    }
    throw NonConvergence(std::string(what) + ": no convergence after " + std::to_string(max_iter) + " iterations",
                         max_iter, s.ratios.empty() ? 0.0 : s.ratios.back());
}

// Pseudosolutions for the grid hierarchy: y's own grid, then halvings.
std::vector<PseudoSolution> levels(const PseudoSolution& y, int refinements) {
    std::vector<PseudoSolution> out{y};
    if (!y.resample) return out;
    Grid g = y.traj.t;
    for (int r = 0; r < refinements; ++r) {
        g = refine(g);
        out.push_back(y.resample(g));
    }
    return out;
}

// Index of the last grid point kept after cutting where the neglected
// backward tail weight N e^{-lambda (T - t)} falls below tol.
std::size_t cut_index(const Grid& t, const DichotomyData& d, double tol) {
    const double keep_until = t.back() - std::log(std::max(d.N / tol, 1.0)) / d.lambda;
    std::size_t idx = 0;
    while (idx + 1 < t.size() && t[idx + 1] <= keep_until) ++idx;
    return idx;
}

struct Combined {
    Field z;
    double quadrature_error = 0.0;
};

// Richardson combination of the two finest levels on the coarser grid
// (trapezoid errors expand in h^2).
Combined combine(const std::vector<Field>& zs, NormKind k) {
    Combined c;
    if (zs.size() == 1) {
        c.z = zs.front();
        return c;
    }
    const Field& coarse = zs[zs.size() - 2];
    const Field& fine = zs.back();
    c.z.resize(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const Vector& f = fine[2 * i];
        c.z[i] = f + (f - coarse[i]) / 3.0;
        c.quadrature_error = std::max(c.quadrature_error, vector_norm(f - coarse[i], k) / 3.0);
    }
    return c;
}

double residual_of(const OdeSystem& sys, const Grid& t, const Field& x, const Field& xdot, NormKind k) {
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) r = std::max(r, vector_norm(xdot[i] - sys.g(t[i], x[i]), k));
    return r;
}

void require_split(const OdeSystem& sys, const DichotomyData& d, const PseudoSolution& y) {
    if (!sys.split) throw StructureError("system '" + sys.name + "' has no semilinear split A + f");
    if (d.n != sys.n || y.dim() != sys.n) throw DimensionError("system, dichotomy data and pseudosolution disagree");
    if (y.size() < 5) throw DataError("pseudosolution grid needs at least 5 points");
}

}  // namespace

ShadowResult shadow_dichotomy(const OdeSystem& sys, const DichotomyData& d, const PseudoSolution& y,
                              const Certificate& cert, const PicardOptions& opts) {
    require_split(sys, d, y);
    if (cert.route == Route::LogNorm) throw ArgumentError("log-norm certificates need shadow_lognorm");
    if (y.sigma > cert.eps0) {
        throw AdmissibilityError("pseudosolution error " + std::to_string(y.sigma) + " exceeds eps0 = " +
                                 std::to_string(cert.eps0));
    }
    const NormKind k = y.norm;
    const auto& split = *sys.split;
    const auto ys = levels(y, opts.refinements);

    ShadowResult res;
    std::vector<Field> zs;
    for (const auto& yl : ys) {
        const Grid& t = yl.traj.t;
        Field h(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            h[i] = split.a(t[i]) * yl.traj.x[i] + split.f(t[i], yl.traj.x[i]) - yl.deriv[i];
        }
        const GridOperator op(split.a, d, t);
        auto kernel = [&](const Field& z) {
            Field phi(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) {
                const Vector& yi = yl.traj.x[i];
                phi[i] = split.f(t[i], yi + z[i]) - split.f(t[i], yi) + h[i];
            }
            return phi;
        };
        auto sol = fixed_point(op, t.size(), sys.n, kernel, 1.0, opts.tol, opts.max_iter, opts.ratio_floor, k,
                               "Picard iteration");
        res.iterations += sol.iterations;
        res.ratios.insert(res.ratios.end(), sol.ratios.begin(), sol.ratios.end());
        zs.push_back(std::move(sol.z));
    }
    auto comb = combine(zs, k);
    const PseudoSolution& base = ys.size() == 1 ? ys.front() : ys[ys.size() - 2];
    const Grid& t = base.traj.t;

    std::size_t last = t.size() - 1;
    if (y.traj.infinite_horizon && d.kind != DichotomyKind::Contraction) {
        last = std::max<std::size_t>(cut_index(t, d, opts.tol), std::min<std::size_t>(4, t.size() - 1));
        const double L = cert.assumptions.L.value_or(0.0);
        res.truncation_error = d.N * std::exp(-d.lambda * (t.back() - t[last])) / d.lambda *
                               (L * cert.kappa + 1.0) * y.sigma;
    }
    const std::size_t K = last + 1;
    Grid tk(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(K));
    Field zk(comb.z.begin(), comb.z.begin() + static_cast<std::ptrdiff_t>(K));

    res.pseudo.t = tk;
    res.pseudo.x.assign(base.traj.x.begin(), base.traj.x.begin() + static_cast<std::ptrdiff_t>(K));
    res.pseudo.horizon = tk.back();
    res.solution.t = tk;
    res.solution.horizon = tk.back();
    Field xdot;
    const Field zdot = K >= 5 ? fd_derivative(tk, zk) : Field(K, Vector::Zero(sys.n));
    for (std::size_t i = 0; i < K; ++i) {
        res.solution.x.push_back(res.pseudo.x[i] + zk[i]);
        xdot.push_back(base.deriv[i] + zdot[i]);
        res.sup_dist = std::max(res.sup_dist, vector_norm(zk[i], k));
    }
    res.residual = residual_of(sys, tk, res.solution.x, xdot, k);
    res.sigma = y.sigma;
    res.bound = cert.kappa * y.sigma;
    res.quadrature_error = comb.quadrature_error;
    res.tolerance = opts.tol + comb.quadrature_error + res.truncation_error;
    res.passed = res.sup_dist <= res.bound + res.tolerance;
    return res;
}

ShadowResult shadow_lognorm(const OdeSystem& sys, const PseudoSolution& y, const Certificate& cert, const Region& H,
                            double tol) {
    if (cert.route != Route::LogNorm) throw ArgumentError("shadow_lognorm needs a log-norm certificate");
    if (y.dim() != sys.n || H.dim() != sys.n) throw DimensionError("system, region and pseudosolution disagree");
    if (y.sigma > cert.eps0) {
        throw AdmissibilityError("pseudosolution error " + std::to_string(y.sigma) + " exceeds eps0 = " +
                                 std::to_string(cert.eps0));
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!H.contains(y.traj.x[i])) {
            throw AdmissibilityError("pseudosolution leaves " + H.describe() + " at t = " +
                                     std::to_string(y.traj.t[i]));
        }
    }
    if (y.size() < 2) throw DataError("pseudosolution grid needs at least 2 points");
    const NormKind k = y.norm;
    const double m = 1.0 / cert.kappa;
    IntegrateOptions io;
    io.tol = tol;
    // Integrate on a 4x refined grid: the residual check differences there,
    // the comparison with y uses every fourth point.
    const Grid fine = refine(refine(y.traj.t));
    auto xf = integrate_on(sys, y.traj.x.front(), fine, io);
    Trajectory x;
    for (std::size_t i = 0; i < xf.size(); i += 4) {
        x.t.push_back(xf.t[i]);
        x.x.push_back(xf.x[i]);
    }
    x.horizon = x.t.back();
    x.blew_up = xf.blew_up;
    x.blowup_time = xf.blowup_time;

    ShadowResult res;
    res.sigma = y.sigma;
    res.bound = cert.kappa * y.sigma;
    // Global error of the integrator, a few orders above its local tolerance.
    res.tolerance = 1e3 * tol;
    const std::size_t K = x.size();
    res.pseudo.t = x.t;
    res.pseudo.x.assign(y.traj.x.begin(), y.traj.x.begin() + static_cast<std::ptrdiff_t>(K));
    res.pseudo.horizon = x.t.back();
    for (std::size_t i = 0; i < K; ++i) {
        const double dist = vector_norm(x.x[i] - y.traj.x[i], k);
        res.sup_dist = std::max(res.sup_dist, dist);
        const bool strict = y.sigma > 0.0 ? dist < y.sigma / m : dist <= res.tolerance;
        res.strict_bound = res.strict_bound && strict;
    }
    if (xf.size() >= 5) {
        const Field xdot = fd_derivative(xf.t, xf.x);
        res.residual = residual_of(sys, xf.t, xf.x, xdot, k);
    }
    res.hypothesis_refuted = x.blew_up;
    res.solution = std::move(x);
    res.passed = !res.hypothesis_refuted && res.sup_dist <= res.bound + res.tolerance && res.strict_bound;
    return res;
}

RelocateResult relocate(const OdeSystem& sys, const DichotomyData& d, const PseudoSolution& y, double rho,
                        const RelocateOptions& opts) {
    require_split(sys, d, y);
    if (!(rho > 0.0)) throw ArgumentError("rho must be positive");
    if (!(opts.omega > 0.0 && opts.omega <= 1.0)) throw ArgumentError("damping must lie in (0, 1]");
    const NormKind k = y.norm;
    const auto& split = *sys.split;

    // Sampled sup of |f(t, x)| / |x| over B_rho(0).
    std::mt19937_64 rng(opts.seed);
    double L_seen = 0.0;
    Vector worst = Vector::Zero(sys.n);
    auto probe = [&](const Vector& x) {
        const double nx = vector_norm(x, k);
        if (nx <= 0.0) return;
        for (double t : {0.0, 1.0, 2.0, 5.0, 10.0}) {
            const double r = vector_norm(split.f(t, x), k) / nx;
            if (r > L_seen) {
                L_seen = r;
                worst = x;
            }
        }
    };
    for (const auto& dir : unit_ball_extremes(sys.n, k)) {
        probe(rho * dir);
        probe(0.5 * rho * dir);
        probe(1e-3 * rho * dir);
    }
    for (long s = 0; s < opts.samples; ++s) probe(random_in_ball(sys.n, rho, k, s % 4 == 0, rng));
    double L = L_seen;
    if (opts.L) {
        if (L_seen > *opts.L * (1.0 + 1e-9) + 1e-12) {
            throw HypothesisViolated("|f(t,x)| <= L|x| fails on B_rho(0): ratio " + std::to_string(L_seen) +
                                         " > L = " + std::to_string(*opts.L),
                                     worst, L_seen);
        }
        L = *opts.L;
    }
    RelocateResult out;
    out.L = L;
    out.eps = (growth_threshold(d.N, d.lambda, DichotomyKind::Dichotomy) - L) * rho;
    if (!(out.eps > 0.0)) {
        throw NotApplicableError("relocation needs L < lambda/(2N); got L = " + std::to_string(L));
    }
    if (y.sigma > out.eps) {
        throw AdmissibilityError("pseudosolution error " + std::to_string(y.sigma) + " exceeds eps = " +
                                 std::to_string(out.eps));
    }

    const auto ys = levels(y, opts.refinements);
    std::vector<Field> zs;
    for (const auto& yl : ys) {
        const Grid& t = yl.traj.t;
        Field h(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            h[i] = split.a(t[i]) * yl.traj.x[i] + split.f(t[i], yl.traj.x[i]) - yl.deriv[i];
        }
        const GridOperator op(split.a, d, t);
        auto kernel = [&](const Field& z) {
            Field phi(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) phi[i] = split.f(t[i], z[i]) - h[i];
            return phi;
        };
        auto sol = fixed_point(op, t.size(), sys.n, kernel, opts.omega, opts.tol, opts.max_iter, 1e-13, k,
                               "relocation");
        out.iterations += sol.iterations;
        out.ratios.insert(out.ratios.end(), sol.ratios.begin(), sol.ratios.end());
        zs.push_back(std::move(sol.z));
    }
    auto comb = combine(zs, k);
    const PseudoSolution& base = ys.size() == 1 ? ys.front() : ys[ys.size() - 2];
    const Grid& t = base.traj.t;
    std::size_t last = t.size() - 1;
    if (y.traj.infinite_horizon && d.kind != DichotomyKind::Contraction) {
        last = std::max<std::size_t>(cut_index(t, d, opts.tol), std::min<std::size_t>(4, t.size() - 1));
        out.truncation_error =
            d.N * std::exp(-d.lambda * (t.back() - t[last])) / d.lambda * (L * rho + y.sigma);
    }
    const std::size_t K = last + 1;
    Trajectory zt;
    zt.t.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(K));
    zt.x.assign(comb.z.begin(), comb.z.begin() + static_cast<std::ptrdiff_t>(K));
    zt.horizon = zt.t.back();
    if (K < 5) throw DataError("relocated grid is too short for finite differences");
    out.z = measure(zt, {}, sys, k);
    out.z.source = "relocated";
    for (std::size_t i = 0; i < K; ++i) {
        out.error_mismatch = std::max(out.error_mismatch, std::abs(out.z.err[i] - base.err[i]));
        out.sup_norm = std::max(out.sup_norm, vector_norm(zt.x[i], k));
    }
    return out;
}

}  // namespace shadowlab
