#include "shadowlab/pseudo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <random>

#include "shadowlab/errors.hpp"
#include "shadowlab/ode_solver.hpp"

namespace shadowlab {

namespace {

// Fornberg's recursion for first-derivative weights at z on arbitrary nodes.
std::vector<double> fornberg_weights(double z, std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = 1;
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

double norm_scale(NormKind k, Eigen::Index n) {
    switch (k) {
        case NormKind::Inf: return 1.0;
        case NormKind::One: return 1.0 / static_cast<double>(n);
        case NormKind::Two: return 1.0 / std::sqrt(static_cast<double>(n));
    }
    return 1.0;
}

// Sum of sinusoids with |value|_inf <= peak: each component's coefficient
// magnitudes sum to at most peak.
struct SineSum {
    std::vector<double> omega;
    Matrix coef;   // n x modes
    Matrix phase;  // n x modes

    static SineSum random(Eigen::Index n, int modes, double peak, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> freq(0.2, 3.0), unit(-1.0, 1.0),
            ph(0.0, 2.0 * std::numbers::pi);
        SineSum s;
        s.coef.resize(n, modes);
        s.phase.resize(n, modes);
        for (int j = 0; j < modes; ++j) s.omega.push_back(freq(rng));
        for (int j = 0; j < modes; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                s.coef(i, j) = unit(rng);
                s.phase(i, j) = ph(rng);
            }
        }
        const double worst = s.coef.cwiseAbs().rowwise().sum().maxCoeff();
        if (worst > 0.0) s.coef *= peak / worst;
        return s;
    }

    [[nodiscard]] Vector value(double t) const {
        Vector v = Vector::Zero(coef.rows());
        for (std::size_t j = 0; j < omega.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            for (Eigen::Index i = 0; i < coef.rows(); ++i) v(i) += coef(i, jj) * std::sin(omega[j] * t + phase(i, jj));
        }
        return v;
    }

    [[nodiscard]] Vector derivative(double t) const {
        Vector v = Vector::Zero(coef.rows());
        for (std::size_t j = 0; j < omega.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            for (Eigen::Index i = 0; i < coef.rows(); ++i) {
                v(i) += coef(i, jj) * omega[j] * std::cos(omega[j] * t + phase(i, jj));
            }
        }
        return v;
    }
};

double max_step(std::span<const double> grid) {
    double h = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) h = std::max(h, grid[i] - grid[i - 1]);
    return h;
}

double excursion(const std::vector<Vector>& deriv, NormKind k, std::span<const double> grid) {
    double top = 0.0;
    for (const auto& d : deriv) top = std::max(top, vector_norm(d, k));
    return 0.5 * top * max_step(grid);
}

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw ArgumentError("grid must be nonempty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ArgumentError("grid must be strictly increasing");
    }
}

PseudoSolution perturbed_on(const OdeSystem& sys, const Vector& x0, std::span<const double> grid,
                            const SineSum& eta, const Region& H, double amplitude, std::uint64_t seed,
                            const PerturbOptions& opts) {
    RhsFunction rhs = [&sys, &eta](double t, const Vector& x) -> Vector { return sys.g(t, x) + eta.value(t); };
    SolverOptions so;
    so.abs_tol = opts.tol;
    so.rel_tol = opts.tol;
    auto res = solve_ivp(rhs, x0, grid, so);
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        if (!H.contains(res.x[i])) {
            throw ContainmentError("pseudo-orbit leaves " + H.describe() + " at t = " + std::to_string(res.t[i]),
                                   res.t[i]);
        }
    }
    if (res.blew_up || res.underflow) {
        throw ContainmentError("pseudo-orbit blew up at t = " + std::to_string(res.stop_time), res.stop_time);
    }
    Trajectory traj;
    traj.t = std::move(res.t);
    traj.x = std::move(res.x);
    traj.horizon = grid.back();
    std::vector<Vector> deriv;
    deriv.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) deriv.push_back(sys.g(traj.t[i], traj.x[i]) + eta.value(traj.t[i]));
    auto y = measure(std::move(traj), std::move(deriv), sys, opts.norm);
    y.source = "perturbed_orbit";
    y.analytic_derivative = true;
    y.seed = seed;
    y.amplitude = amplitude;
    y.excursion_bound = excursion(y.deriv, opts.norm, y.traj.t);
    return y;
}

}  // namespace

std::vector<Vector> fd_derivative(std::span<const double> t, const std::vector<Vector>& x) {
    const std::size_t n = t.size();
    if (n < 5 || x.size() != n) throw DataError("finite differences need at least 5 grid points with states");
    std::vector<Vector> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t start = std::min(i >= 2 ? i - 2 : 0, n - 5);
        const auto w = fornberg_weights(t[i], t.subspan(start, 5));
        Vector acc = Vector::Zero(x[i].size());
        for (std::size_t j = 0; j < 5; ++j) acc += w[j] * x[start + j];
        d[i] = std::move(acc);
    }
    return d;
}

PseudoSolution measure(Trajectory y, std::vector<Vector> deriv, const OdeSystem& sys, NormKind k) {
    if (y.t.empty() || y.x.size() != y.t.size()) throw DataError("pseudosolution grid is empty or ragged");
    PseudoSolution out;
    if (deriv.empty()) {
        deriv = fd_derivative(y.t, y.x);
    } else {
        out.analytic_derivative = true;
        if (deriv.size() != y.t.size()) throw DataError("derivative samples do not match the grid");
    }
    out.err.resize(y.t.size());
    for (std::size_t i = 0; i < y.t.size(); ++i) {
        if (y.x[i].size() != sys.n || deriv[i].size() != sys.n) throw DimensionError("pseudosolution dimension mismatch");
        out.err[i] = vector_norm(deriv[i] - sys.g(y.t[i], y.x[i]), k);
        out.sigma = std::max(out.sigma, out.err[i]);
    }
    if (!std::isfinite(out.sigma)) throw DataError("pseudosolution error is not finite");
    out.traj = std::move(y);
    out.deriv = std::move(deriv);
    out.norm = k;
    out.source = "measured";
    return out;
}

PseudoSolution exm_pseudosolution(double delta, std::span<const double> grid) {
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("exm pseudosolution needs 0 < delta < 1");
    check_grid(grid);
    Trajectory traj;
    std::vector<Vector> deriv;
    for (double t : grid) {
        const double th = std::tanh(delta * t);
        traj.t.push_back(t);
        traj.x.push_back(Vector::Constant(1, -0.5 + delta * th));
        deriv.push_back(Vector::Constant(1, delta * delta * (1.0 - th * th)));
    }
    traj.horizon = grid.back();
    traj.infinite_horizon = true;
    auto y = measure(std::move(traj), std::move(deriv), exm_system(), NormKind::Inf);
    y.source = "exm_pseudosolution";
    y.amplitude = delta;
    y.excursion_bound = 0.0;  // monotone between grid points, range [-1/2, -1/2 + delta)
    y.resample = [delta](std::span<const double> g) { return exm_pseudosolution(delta, g); };
    return y;
}

PseudoSolution perturbed_orbit(const OdeSystem& sys, const Vector& x0, double T, double amplitude,
                               std::uint64_t seed, const Region& H, const PerturbOptions& opts) {
    if (!(amplitude >= 0.0)) throw ArgumentError("forcing amplitude must be nonnegative");
    if (!(T > 0.0)) throw ArgumentError("horizon must be positive");
    if (x0.size() != sys.n || H.dim() != sys.n) throw DimensionError("initial state, region and system disagree");
    if (opts.modes < 1 || opts.modes > 5) throw ArgumentError("forcing uses between 1 and 5 modes");
    if (!H.contains(x0)) throw ContainmentError("initial state lies outside " + H.describe(), 0.0);
    std::mt19937_64 rng(seed);
    const auto eta = std::make_shared<SineSum>(
        SineSum::random(sys.n, opts.modes, amplitude * norm_scale(opts.norm, sys.n), rng));
    const std::size_t points =
        opts.points ? opts.points : std::max<std::size_t>(201, static_cast<std::size_t>(std::ceil(T / 0.01)) + 1);
    const auto grid = uniform_grid(0.0, T, points);
    auto y = perturbed_on(sys, x0, grid, *eta, H, amplitude, seed, opts);
    y.resample = [sys, x0, eta, H, amplitude, seed, opts](std::span<const double> g) {
        auto r = perturbed_on(sys, x0, g, *eta, H, amplitude, seed, opts);
        r.resample = nullptr;
        return r;
    };
    return y;
}

PseudoSolution oscillating_pseudosolution(const OdeSystem& sys, const Vector& center, double T, std::size_t points,
                                          double target_sigma, std::uint64_t seed, NormKind k) {
    if (!(target_sigma >= 0.0)) throw ArgumentError("target error must be nonnegative");
    if (center.size() != sys.n) throw DimensionError("center has the wrong dimension");
    std::mt19937_64 rng(seed);
    const auto shape = std::make_shared<SineSum>(SineSum::random(sys.n, 5, 1.0, rng));
    auto build = [sys, center, shape, seed, k](double r, std::span<const double> grid) {
        Trajectory traj;
        std::vector<Vector> deriv;
        for (double t : grid) {
            traj.t.push_back(t);
            traj.x.push_back(center + r * shape->value(t));
            deriv.push_back(r * shape->derivative(t));
        }
        traj.horizon = grid.back();
        auto y = measure(std::move(traj), std::move(deriv), sys, k);
        y.source = "oscillating_pseudosolution";
        y.seed = seed;
        y.amplitude = r;
        y.excursion_bound = excursion(y.deriv, k, grid);
        return y;
    };
    const auto grid = uniform_grid(0.0, T, points);
    double r = target_sigma;
    PseudoSolution y = build(r, grid);
    for (int it = 0; it < 100 && y.sigma > target_sigma; ++it) {
        r *= 0.9 * target_sigma / y.sigma;
        y = build(r, grid);
    }
    if (y.sigma > target_sigma) throw ArgumentError("could not scale the oscillation below the target error");
    y.resample = [build, r](std::span<const double> g) { return build(r, g); };
    return y;
}

PseudoSolution constant_pseudosolution(const OdeSystem& sys, const Vector& p, std::span<const double> grid,
                                       NormKind k) {
    check_grid(grid);
    Trajectory traj;
    std::vector<Vector> deriv;
    for (double t : grid) {
        traj.t.push_back(t);
        traj.x.push_back(p);
        deriv.push_back(Vector::Zero(p.size()));
    }
    traj.horizon = grid.back();
    traj.infinite_horizon = true;
    auto y = measure(std::move(traj), std::move(deriv), sys, k);
    y.source = "constant";
    y.resample = [sys, p, k](std::span<const double> g) { return constant_pseudosolution(sys, p, g, k); };
    return y;
}

void write_pseudo_csv(std::ostream& os, const PseudoSolution& y) {
    const auto n = y.dim();
    os << "t";
    for (Eigen::Index j = 0; j < n; ++j) os << ",y" << (j + 1);
    os << ",e\n" << std::setprecision(17);
    for (std::size_t i = 0; i < y.size(); ++i) {
        os << y.traj.t[i];
        for (Eigen::Index j = 0; j < n; ++j) os << "," << y.traj.x[i](j);
        os << "," << y.err[i] << "\n";
    }
}

nlohmann::json pseudo_json(const PseudoSolution& y) {
    nlohmann::json j;
    j["sigma"] = y.sigma;
    j["seed"] = y.seed ? nlohmann::json(*y.seed) : nlohmann::json(nullptr);
    j["amplitude"] = y.amplitude;
    j["norm"] = to_string(y.norm);
    j["source"] = y.source;
    j["points"] = y.size();
    j["horizon"] = y.traj.horizon;
    j["infinite_horizon"] = y.traj.infinite_horizon;
    j["analytic_derivative"] = y.analytic_derivative;
    j["excursion_bound"] = y.excursion_bound;
    j["containment"] = "checked at grid points only";
    return j;
}

}  // namespace shadowlab
